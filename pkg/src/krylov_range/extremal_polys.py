"""Remez-type extremal polynomials on circle arcs, slit disks and half annuli.

Three families are provided:

* circle:  ``P(z) = z^m T_m((z + 1/z - 2 c1) / ((1 - delta)(c2 - c1)) - 1)``, degree ``2m``
* disk:    ``Q(z) = z^{2m} T_m((z + 1/z) / (2 cos eps))``, degree ``3m``
* annulus: ``Q_{m, 2 delta/3}(P(z))`` with ``P(z) = (1 - delta/4) z^2 + (1 - delta/8) z + 1``,
  degree ``6m``

Each is a polynomial although the defining formula contains ``1/z``.  They are
evaluated through the homogeneous Chebyshev recurrence
``S_0 = 1, S_1 = u, S_{k+1} = 2 u S_k - w^2 S_{k-1}``, which gives
``S_m = w^m T_m(u / w)`` without ever dividing by ``w``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as npcheb
from numpy.polynomial import polynomial as nppoly

from .errors import DomainError

__all__ = [
    "PolySpec",
    "RegionSpec",
    "CertReport",
    "chebyshev_T",
    "circle_poly_eval",
    "disk_poly_eval",
    "annulus_poly_eval",
    "poly_eval",
    "log_abs_poly",
    "poly_coeffs",
    "quad_map",
    "in_region",
    "region_boundary",
    "certify_remez",
    "certify_appendix_map",
    "appendix_arcs",
]

_FAMILIES = ("circle", "disk", "annulus")
_DEGREE_FACTOR = {"circle": 2, "disk": 3, "annulus": 6}


@dataclass(frozen=True)
class PolySpec:
    """Parameters of one extremal polynomial.

    ``delta`` is used by the circle and annulus families, ``eps`` by the disk
    family and ``c1, c2`` by the circle family.
    """

    family: str
    m: int
    delta: float = 0.0
    eps: float = 0.1
    c1: float = -1.0
    c2: float = 1.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")
        if int(self.m) != self.m or self.m < 1:
            raise DomainError("m must be a positive integer")
        if self.family in ("circle", "annulus") and not 0.0 <= self.delta < 1.0:
            raise DomainError("delta must lie in [0, 1)")
        if self.family == "disk" and not 0.0 < self.eps < 1.0:
            raise DomainError("eps must lie in (0, 1)")
        if self.family == "circle" and not -1.0 <= self.c1 < self.c2 <= 1.0:
            raise DomainError("need -1 <= c1 < c2 <= 1")

    @property
    def degree(self) -> int:
        return _DEGREE_FACTOR[self.family] * self.m

    def params(self) -> dict:
        if self.family == "circle":
            return {"m": self.m, "delta": self.delta, "c1": self.c1, "c2": self.c2}
        if self.family == "disk":
            return {"m": self.m, "eps": self.eps}
        return {"m": self.m, "delta": self.delta}


@dataclass(frozen=True)
class RegionSpec:
    """A planar region: ``half_annulus_D`` (delta), ``slit_disk_R`` (eps) or ``circle_arc``."""

    kind: str
    delta: float = 0.0
    eps: float = 0.1
    c1: float = -1.0
    c2: float = 1.0

    def __post_init__(self):
        if self.kind not in ("half_annulus_D", "slit_disk_R", "circle_arc"):
            raise DomainError(f"unknown region kind {self.kind!r}")
        if self.kind in ("half_annulus_D", "circle_arc") and not 0.0 <= self.delta < 1.0:
            raise DomainError("delta must lie in [0, 1)")
        if self.kind == "slit_disk_R" and not 0.0 < self.eps < 1.0:
            raise DomainError("eps must lie in (0, 1)")
        if self.kind == "circle_arc" and not -1.0 <= self.c1 < self.c2 <= 1.0:
            raise DomainError("need -1 <= c1 < c2 <= 1")


@dataclass
class CertReport:
    """Outcome of a grid certification of a Remez-type inequality."""

    family: str
    params: dict
    point: complex
    value_at_point: float
    max_on_region: float
    interior_max: float
    ratio: float
    factor: float
    grid_size: int
    passed: bool = field(default=False)

    @property
    def pass_(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        d = asdict(self)
        d["point"] = [float(np.real(self.point)), float(np.imag(self.point))]
        d["pass"] = d.pop("passed")
        return d


def chebyshev_T(m: int, z):
    """Chebyshev polynomial ``T_m`` evaluated by the three-term recurrence."""
    if int(m) != m or m < 0:
        raise DomainError("degree must be a non-negative integer")
    z = np.asarray(z, dtype=np.complex128)
    t0, t1 = np.ones_like(z), z
    if m == 0:
        out = t0
    else:
        for _ in range(int(m) - 1):
            t0, t1 = t1, 2 * z * t1 - t0
        out = t1
    return out[()] if out.ndim == 0 else out


def _homogeneous(u, w2, m: int, log: bool = False):
    """``S_m = w^m T_m(u / w)`` via ``S_{k+1} = 2 u S_k - w^2 S_{k-1}``.

    With ``log=True`` returns ``log |S_m|``; the pair ``(S_k, S_{k-1})`` is
    rescaled whenever it grows past ``1e150`` so that nothing overflows.
    """
    u = np.asarray(u, dtype=np.complex128)
    w2 = np.asarray(w2, dtype=np.complex128)
    s0 = np.ones(np.broadcast(u, w2).shape, dtype=np.complex128)
    s1 = u * s0
    logscale = np.zeros(s0.shape)
    if m == 0:
        s1 = s0
    for _ in range(m - 1):
        s0, s1 = s1, 2 * u * s1 - w2 * s0
        if log:
            big = np.maximum(np.abs(s1), np.abs(s0))
            r = big > 1e150
            if np.any(r):
                f = np.where(r, big, 1.0)
                s0, s1 = s0 / f, s1 / f
                logscale += np.log(f)
    if log:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(s1)) + logscale
    return s1


def _circle_u(spec: PolySpec, z):
    s = (1 - spec.delta) * (spec.c2 - spec.c1)
    return (z * z + 1 - 2 * spec.c1 * z) / s - z


def circle_poly_eval(spec: PolySpec, z):
    """Circle-arc polynomial ``z^m T_m((z + 1/z - 2 c1) / ((1 - delta)(c2 - c1)) - 1)``.

    Evaluated in cleared (polynomial) form, so ``z = 0`` is allowed.
    """
    if spec.family != "circle":
        raise DomainError("spec is not a circle polynomial")
    z = np.asarray(z, dtype=np.complex128)
    out = _homogeneous(_circle_u(spec, z), z * z, spec.m)
    return out[()] if out.ndim == 0 else out


def _disk_value(m: int, eps: float, z, log: bool = False):
    u = (z * z + 1) / (2 * np.cos(eps))
    s = _homogeneous(u, z * z, m, log=log)
    if log:
        with np.errstate(divide="ignore"):
            return s + m * np.log(np.abs(z))
    return z ** m * s


def disk_poly_eval(spec: PolySpec, z):
    """Slit-disk polynomial ``z^{2m} T_m((z + 1/z) / (2 cos eps))`` in cleared form."""
    if spec.family != "disk":
        raise DomainError("spec is not a disk polynomial")
    z = np.asarray(z, dtype=np.complex128)
    out = _disk_value(spec.m, spec.eps, z)
    return out[()] if out.ndim == 0 else out


def quad_map(delta: float, z):
    """``P(z) = (1 - delta/4) z^2 + (1 - delta/8) z + 1``."""
    if not 0.0 <= delta < 1.0:
        raise DomainError("delta must lie in [0, 1)")
    z = np.asarray(z, dtype=np.complex128)
    out = ((1 - delta / 4) * z + (1 - delta / 8)) * z + 1
    return out[()] if out.ndim == 0 else out


def annulus_poly_eval(spec: PolySpec, z):
    """Half-annulus polynomial ``Q_{m, 2 delta/3}(P(z))``."""
    if spec.family != "annulus":
        raise DomainError("spec is not an annulus polynomial")
    p = np.asarray(quad_map(spec.delta, z))
    out = _disk_value(spec.m, 2 * spec.delta / 3, p)
    return out[()] if out.ndim == 0 else out


def poly_eval(spec: PolySpec, z):
    """Dispatch on ``spec.family``."""
    return {"circle": circle_poly_eval, "disk": disk_poly_eval,
            "annulus": annulus_poly_eval}[spec.family](spec, z)


def log_abs_poly(spec: PolySpec, z) -> np.ndarray:
    """``log |p(z)|`` computed with rescaling, safe for large ``m``."""
    z = np.asarray(z, dtype=np.complex128)
    if spec.family == "circle":
        return _homogeneous(_circle_u(spec, z), z * z, spec.m, log=True)
    if spec.family == "disk":
        return _disk_value(spec.m, spec.eps, z, log=True)
    return _disk_value(spec.m, 2 * spec.delta / 3, np.asarray(quad_map(spec.delta, z)), log=True)


def _homogeneous_coeffs(u: np.ndarray, w: np.ndarray, m: int) -> np.ndarray:
    # sum_j t_j u^j w^(m-j) with T_m = sum_j t_j x^j
    t = npcheb.cheb2poly(np.eye(m + 1)[m])
    out = np.zeros(1)
    for j, tj in enumerate(t):
        if tj != 0:
            term = tj * nppoly.polymul(nppoly.polypow(u, j), nppoly.polypow(w, m - j))
            out = nppoly.polyadd(out, term)
    return out


def poly_coeffs(spec: PolySpec) -> np.ndarray:
    """Power-basis coefficients (ascending) of the cleared polynomial.

    Built by expanding the Chebyshev coefficients against the clearing factors;
    intended for moderate ``m`` (tests and evaluation checks near poles).
    """
    m = spec.m
    if spec.family == "circle":
        s = (1 - spec.delta) * (spec.c2 - spec.c1)
        u = np.array([1 / s, -2 * spec.c1 / s - 1, 1 / s])
        return _homogeneous_coeffs(u, np.array([0.0, 1.0]), m)

    def disk(eps):
        u = np.array([1.0, 0.0, 1.0]) / (2 * np.cos(eps))
        return nppoly.polymul(np.eye(m + 1)[m], _homogeneous_coeffs(u, np.array([0.0, 1.0]), m))

    if spec.family == "disk":
        return disk(spec.eps)
    q = disk(2 * spec.delta / 3)
    P = np.array([1.0, 1 - spec.delta / 8, 1 - spec.delta / 4])
    out = np.zeros(1)
    for c in q[::-1]:
        out = nppoly.polyadd(nppoly.polymul(out, P), [c])
    return out


def in_region(spec: RegionSpec, z, tol: float = 0.0):
    """Membership of ``z`` in the region, with an absolute slack ``tol``.

    ``half_annulus_D``: ``delta <= |z| <= 1`` and ``Re z <= 0``.
    ``slit_disk_R``: ``|z| <= 1`` with ``arg z`` in ``[eps, pi - eps]`` or
    ``[pi + eps, 2 pi - eps]``, or ``|z| <= 1 - eps/8``.
    ``circle_arc``: ``|z| = 1`` with ``cos(arg z)`` in ``[c1, c2 - delta (c2 - c1)]``.
    """
    z = np.asarray(z, dtype=np.complex128)
    r = np.abs(z)
    if spec.kind == "half_annulus_D":
        out = (r >= spec.delta - tol) & (r <= 1 + tol) & (z.real <= tol)
    elif spec.kind == "slit_disk_R":
        # arg in the two sectors  <=>  |Im z| >= |z| sin(eps)
        sector = (r <= 1 + tol) & (np.abs(z.imag) >= r * np.sin(spec.eps) - tol)
        out = sector | (r <= 1 - spec.eps / 8 + tol)
    else:
        hi = spec.c2 - spec.delta * (spec.c2 - spec.c1)
        c = z.real / np.where(r > 0, r, 1.0)
        out = (np.abs(r - 1) <= tol) & (c >= spec.c1 - tol) & (c <= hi + tol)
    return bool(out) if out.ndim == 0 else out


def _arc(r: float, t0: float, t1: float, n: int) -> np.ndarray:
    return r * np.exp(1j * np.linspace(t0, t1, max(n, 2)))


def _seg(a: complex, b: complex, n: int) -> np.ndarray:
    return a + (b - a) * np.linspace(0.0, 1.0, max(n, 2))


def region_boundary(spec: RegionSpec, density: int) -> np.ndarray:
    """Boundary samples of a region, ``density`` points per unit length (at least 16 per piece)."""
    def npts(length):
        return max(16, int(np.ceil(density * length)))

    if spec.kind == "circle_arc":
        hi = spec.c2 - spec.delta * (spec.c2 - spec.c1)
        t0, t1 = np.arccos(hi), np.arccos(spec.c1)
        a = _arc(1.0, t0, t1, npts(t1 - t0))
        return np.concatenate([a, a.conj()])
    if spec.kind == "half_annulus_D":
        d = spec.delta
        pieces = [_arc(1.0, np.pi / 2, 3 * np.pi / 2, npts(np.pi)),
                  _seg(1j * d, 1j, npts(1 - d)), _seg(-1j * d, -1j, npts(1 - d))]
        if d > 0:
            pieces.append(_arc(d, np.pi / 2, 3 * np.pi / 2, npts(np.pi * d)))
        else:
            pieces.append(np.array([0.0]))
        return np.concatenate(pieces)
    e = spec.eps
    rho = 1 - e / 8
    pieces = [_arc(1.0, e, np.pi - e, npts(np.pi - 2 * e)),
              _arc(1.0, np.pi + e, 2 * np.pi - e, npts(np.pi - 2 * e)),
              _arc(rho, -e, e, npts(2 * e * rho)),
              _arc(rho, np.pi - e, np.pi + e, npts(2 * e * rho))]
    for ang in (e, np.pi - e, np.pi + e, 2 * np.pi - e):
        pieces.append(_seg(0.0, np.exp(1j * ang), npts(1.0)))
    return np.concatenate(pieces)


def _interior_samples(spec: RegionSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    if spec.kind == "circle_arc":
        hi = spec.c2 - spec.delta * (spec.c2 - spec.c1)
        t = rng.uniform(np.arccos(hi), np.arccos(spec.c1), n)
        return np.exp(1j * t * rng.choice([-1.0, 1.0], n))
    out = np.empty(0, dtype=np.complex128)
    while out.size < n:
        z = np.sqrt(rng.uniform(0, 1, 4 * n)) * np.exp(2j * np.pi * rng.uniform(0, 1, 4 * n))
        out = np.concatenate([out, z[in_region(spec, z)]])
    return out[:n]


def _region_for(spec: PolySpec) -> RegionSpec:
    if spec.family == "circle":
        return RegionSpec("circle_arc", delta=spec.delta, c1=spec.c1, c2=spec.c2)
    if spec.family == "disk":
        return RegionSpec("slit_disk_R", eps=spec.eps)
    return RegionSpec("half_annulus_D", delta=spec.delta)


def _default_point(spec: PolySpec) -> complex:
    if spec.family == "circle":
        return complex(np.exp(1j * np.arccos(spec.c2)))
    if spec.family == "disk":
        return 1.0 + 0j
    # the extreme eigenvalue sits at the origin; P(0) = 1 carries it to Q's peak
    return 0j


def _factor(spec: PolySpec) -> float:
    if spec.family == "circle":
        return 0.5 * np.exp(2 * spec.m * np.sqrt(spec.delta))
    if spec.family == "disk":
        return float(np.exp(spec.m * spec.eps / 8))
    return float(np.exp(spec.m * spec.delta / 12))


def certify_remez(spec: PolySpec, grid_density: int = 1000, point: complex | None = None,
                  n_interior: int = 1000, seed: int = 0) -> CertReport:
    """Check ``|p(point)| >= factor * max_{region} |p|`` on a sampling grid.

    The region is the circle arc (circle), ``R_eps`` (disk) or ``D_delta``
    (annulus).  The maximum is taken over a boundary grid with
    ``grid_density`` points per unit length plus ``n_interior`` random interior
    points, which by the maximum-modulus principle should never exceed the
    boundary maximum and serve as a consistency check.  All comparisons are
    done on ``log |p|`` so large degrees do not overflow.

    The default point is ``e^{i arccos c2}`` (circle), ``1`` (disk) and ``0``
    (annulus).
    """
    if grid_density < 1000:
        raise DomainError("grid_density must be >= 1000")
    region = _region_for(spec)
    bd = region_boundary(region, grid_density)
    rng = np.random.default_rng(seed)
    inner = _interior_samples(region, n_interior, rng)
    z0 = _default_point(spec) if point is None else complex(point)
    lb = log_abs_poly(spec, bd).max()
    li = log_abs_poly(spec, inner).max() if inner.size else -np.inf
    lmax = max(lb, li)
    lv = float(log_abs_poly(spec, np.array([z0]))[0])
    factor = _factor(spec)
    log_ratio = lv - lmax
    return CertReport(
        family=spec.family,
        params=spec.params(),
        point=z0,
        value_at_point=float(np.exp(min(lv, 700.0))),
        max_on_region=float(np.exp(min(lmax, 700.0))),
        interior_max=float(np.exp(min(li, 700.0))),
        ratio=float(np.exp(min(log_ratio, 700.0))),
        factor=factor,
        grid_size=int(bd.size + inner.size),
        passed=bool(log_ratio >= np.log(factor)),
    )


def appendix_arcs(delta: float, n: int) -> list[np.ndarray]:
    """The three boundary pieces of ``D_delta``: unit arc, imaginary segments, inner arc."""
    c = np.linspace(delta, 1.0, n)
    return [
        np.exp(1j * np.linspace(np.pi / 2, 3 * np.pi / 2, n)),
        np.concatenate([1j * c, -1j * c]),
        delta * np.exp(1j * np.linspace(np.pi / 2, 3 * np.pi / 2, n)),
    ]


def certify_appendix_map(delta: float, grid_density: int = 10_000, tol: float = 1e-12) -> bool:
    """Check that ``P`` maps the boundary of ``D_delta`` into ``R_{2 delta/3}``.

    Each of the three boundary pieces is sampled with ``grid_density`` points.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    if grid_density < 10_000:
        raise DomainError("grid_density must be >= 10000")
    region = RegionSpec("slit_disk_R", eps=2 * delta / 3)
    return all(bool(np.all(in_region(region, quad_map(delta, z), tol=tol)))
               for z in appendix_arcs(delta, grid_density))
