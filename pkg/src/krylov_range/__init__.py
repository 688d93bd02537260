"""Krylov-subspace approximation of the numerical range.

Submodules: ``linalg`` (Hermitian eigensolvers, polar decomposition),
``krylov`` (Arnoldi), ``convexgeom`` (numerical range sweep, polygon
distances), ``extremal_polys`` (Remez-type certification), ``ensembles``
(test matrices, beta-normality, probabilistic checks) and ``harness``
(experiments and the ``krylov-range`` CLI).
"""

from .convexgeom import (ConvexPolygon, SweepConfig, hausdorff, numerical_radius,
                         numerical_range, numerical_range_bounds, one_sided_hausdorff)
from .ensembles import MatrixSpec, beta_normality, build_matrix, make_rng, verify_prob
from .errors import (ConfigError, DimensionError, DomainError, KrylovRangeError,
                     PreconditionError, SingularityError)
from .extremal_polys import PolySpec, certify_appendix_map, certify_remez
from .krylov import KrylovDecomposition, arnoldi

__version__ = "0.1.0"

__all__ = [
    "ConvexPolygon", "SweepConfig", "hausdorff", "numerical_radius", "numerical_range",
    "numerical_range_bounds", "one_sided_hausdorff", "MatrixSpec", "beta_normality",
    "build_matrix", "make_rng", "verify_prob", "ConfigError", "DimensionError", "DomainError",
    "KrylovRangeError", "PreconditionError", "SingularityError", "PolySpec",
    "certify_appendix_map", "certify_remez", "KrylovDecomposition", "arnoldi",
]
