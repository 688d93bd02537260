"""Arnoldi iteration and Rayleigh-quotient utilities.

``arnoldi`` builds an orthonormal basis ``Q`` of the Krylov subspace
``K_m(A, b) = span{b, Ab, ..., A^{m-1} b}`` together with the projection
``H = Q^* A Q``, which is upper Hessenberg.  If the subspace stops growing at
dimension ``k < m`` the decomposition is truncated to ``k`` and flagged, so
``H_m`` is taken to be ``H_k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import NORM_FLOOR, as_vector

__all__ = [
    "KrylovDecomposition",
    "arnoldi",
    "rayleigh_quotient",
    "poly_apply",
    "projection_residual",
    "spectral_rayleigh_quotient",
]


@dataclass(frozen=True)
class KrylovDecomposition:
    """Result of an Arnoldi run.

    Attributes
    ----------
    Q : (n, k) ndarray
        Orthonormal basis of the Krylov subspace.
    H : (k, k) ndarray
        Upper Hessenberg projection ``Q^* A Q``.
    requested_m : int
        Dimension that was asked for.
    breakdown : bool
        True if the subspace became invariant before ``requested_m``.
    """

    Q: np.ndarray
    H: np.ndarray
    requested_m: int
    breakdown: bool

    @property
    def effective_k(self) -> int:
        return self.H.shape[0]

    def leading(self, m: int) -> "KrylovDecomposition":
        """Decomposition for dimension ``m`` obtained from the leading block.

        Arnoldi is nested, so the first ``m`` columns of ``Q`` and the leading
        ``m x m`` block of ``H`` are exactly what a run with ``m`` would return.
        """
        if m < 1:
            raise DomainError("m must be >= 1")
        k = min(m, self.effective_k)
        return KrylovDecomposition(self.Q[:, :k].copy(), self.H[:k, :k].copy(), m,
                                   self.breakdown and k < m)


def _shape(A) -> tuple[int, int]:
    shape = getattr(A, "shape", None)
    if shape is None or len(shape) != 2:
        raise DimensionError("operator must expose a 2-D shape")
    return int(shape[0]), int(shape[1])


def arnoldi(A, b, m: int, tol: float = 1e-12, norm_A: float | None = None) -> KrylovDecomposition:
    """Arnoldi iteration with classical Gram-Schmidt applied twice.

    Parameters
    ----------
    A : (n, n) array_like, sparse matrix or linear operator
        Anything supporting ``A @ x`` for a 1-D complex ``x``.
    b : (n,) array_like
        Starting vector, nonzero.
    m : int
        Requested Krylov dimension, ``m >= 1``.
    tol : float
        Relative breakdown tolerance.  Step ``j`` breaks down when the
        orthogonalized residual has norm ``<= tol * ||A||``.
    norm_A : float, optional
        Scale used in the breakdown test.  When omitted, the running maximum
        of ``||A q_j||`` over the basis vectors seen so far is used, which is a
        lower estimate of ``||A||_2`` that costs nothing extra.

    Returns
    -------
    KrylovDecomposition
    """
    if isinstance(A, np.ndarray) or isinstance(A, (list, tuple)):
        A = np.asarray(A, dtype=np.complex128)
    rows, cols = _shape(A)
    if rows != cols:
        raise DimensionError(f"A must be square, got {(rows, cols)}")
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    m = int(m)
    b = as_vector(b)
    if b.shape[0] != rows:
        raise DimensionError(f"b has length {b.shape[0]}, A has {rows} rows")
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        raise DomainError("starting vector is zero")

    n = rows
    kmax = min(m, n)
    Q = np.zeros((n, kmax), dtype=np.complex128)
    H = np.zeros((kmax, kmax), dtype=np.complex128)
    Q[:, 0] = b / bnorm
    scale = norm_A
    k = kmax
    breakdown = kmax < m
    for j in range(kmax):
        w = np.asarray(A @ Q[:, j], dtype=np.complex128).ravel()
        if norm_A is None:
            scale = max(scale or 0.0, float(np.linalg.norm(w)))
        Qj = Q[:, :j + 1]
        for _ in range(2):
            h = Qj.conj().T @ w
            w = w - Qj @ h
            H[:j + 1, j] += h
        if j + 1 == kmax:
            break
        beta = float(np.linalg.norm(w))
        if beta <= tol * max(scale, NORM_FLOOR):
            k = j + 1
            breakdown = True
            break
        H[j + 1, j] = beta
        Q[:, j + 1] = w / beta
    return KrylovDecomposition(Q[:, :k].copy(), H[:k, :k].copy(), m, breakdown)


def rayleigh_quotient(A, x) -> complex:
    """Return ``x^* A x / x^* x``."""
    x = as_vector(x)
    xx = np.vdot(x, x).real
    if xx == 0.0:
        raise DomainError("Rayleigh quotient of the zero vector")
    Ax = np.asarray(A @ x).ravel()
    if Ax.shape != x.shape:
        raise DimensionError("operator and vector sizes differ")
    return complex(np.vdot(x, Ax) / xx)


def poly_apply(A, b, coeffs) -> np.ndarray:
    """Evaluate ``sum_j coeffs[j] A^j b`` by Horner's rule on matrix-vector products."""
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128))
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise DomainError("coefficient list must be non-empty")
    b = as_vector(b)
    rows, cols = _shape(A)
    if cols != b.shape[0] or rows != cols:
        raise DimensionError("operator and vector sizes differ")
    y = coeffs[-1] * b
    for c in coeffs[-2::-1]:
        y = np.asarray(A @ y, dtype=np.complex128).ravel() + c * b
    return y


def projection_residual(decomp: KrylovDecomposition, v) -> float:
    """Return ``||v - Q Q^* v||_2`` for the basis ``Q`` of ``decomp``."""
    v = as_vector(v)
    Q = decomp.Q
    if v.shape[0] != Q.shape[0]:
        raise DimensionError(f"vector length {v.shape[0]} != basis rows {Q.shape[0]}")
    r = v - Q @ (Q.conj().T @ v)
    r = r - Q @ (Q.conj().T @ r)
    return float(np.linalg.norm(r))


def spectral_rayleigh_quotient(eigvals, alpha, coeffs, gram=None) -> complex:
    """Rayleigh quotient of ``p(A) b`` written in eigen-coordinates.

    With ``A = V diag(eigvals) V^{-1}``, ``alpha = V^{-1} b`` and ``y = p(Lambda) alpha``
    this is ``y^* G Lambda y / y^* G y`` where ``G = V^* V``.  For ``gram=None``
    (normal ``A``) it reduces to the weighted mean
    ``sum |alpha_j|^2 |p(lambda_j)|^2 lambda_j / sum |alpha_j|^2 |p(lambda_j)|^2``.
    """
    lam = as_vector(eigvals)
    alpha = as_vector(alpha)
    if lam.shape != alpha.shape:
        raise DimensionError("eigenvalues and coefficients differ in length")
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128))
    y = np.polynomial.polynomial.polyval(lam, coeffs) * alpha
    if gram is None:
        wts = np.abs(y) ** 2
        s = wts.sum()
        if s == 0.0:
            raise DomainError("p(A) b is zero")
        return complex((wts * lam).sum() / s)
    G = np.asarray(gram, dtype=np.complex128)
    if G.shape != (lam.size, lam.size):
        raise DimensionError("Gram matrix has the wrong shape")
    Gy = G @ y
    den = np.vdot(y, Gy).real
    if den == 0.0:
        raise DomainError("p(A) b is zero")
    return complex(np.vdot(y, G @ (lam * y)) / den)
