"""Dense complex linear algebra kernel.

Hermitian eigendecomposition, polar decomposition, matrix square roots,
2-norms and condition numbers.  Everything operates on plain numpy arrays;
vectors are 1-D complex arrays and matrices are 2-D complex arrays.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionError, DomainError, SingularityError

__all__ = [
    "HermEigResult",
    "as_matrix",
    "as_vector",
    "hermitianize",
    "hermitian_eig",
    "householder_tridiagonalize",
    "tridiagonal_qr",
    "polar_decompose",
    "psd_sqrt",
    "psd_inv_sqrt",
    "two_norm",
    "condition_number",
]

# absolute floor for relative tolerances, so that zero matrices do not divide by zero
NORM_FLOOR = 1e-300


class HermEigResult(NamedTuple):
    """Eigenvalues in ascending order and a unitary matrix of eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(M, *, square: bool = False) -> np.ndarray:
    """Validate ``M`` as a finite 2-D array and return it as complex128."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D array, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    M = M.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    return M


def as_vector(x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] < 1:
        raise DimensionError(f"expected a non-empty 1-D array, got shape {x.shape}")
    x = x.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(x)):
        raise DomainError("vector has non-finite entries")
    return x


def hermitianize(M: np.ndarray) -> np.ndarray:
    """Return the Hermitian part ``(M + M^*)/2``."""
    return (M + M.conj().T) / 2


def householder_tridiagonalize(M: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reduce a Hermitian matrix to real symmetric tridiagonal form.

    Returns ``(d, e, Q)`` with ``M = Q T Q^*`` where ``T`` has diagonal ``d`` and
    off-diagonal ``e`` (both real, ``e >= 0``) and ``Q`` is unitary.
    """
    A = np.array(M, dtype=np.complex128)
    n = A.shape[0]
    Q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        x = A[k + 1:, k]
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * xnorm
        v /= np.linalg.norm(v)
        # A <- P A P with P = I - 2 v v^* acting on rows/cols k+1:
        A[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ A[k + 1:, :])
        A[:, k + 1:] -= 2.0 * np.outer(A[:, k + 1:] @ v, v.conj())
        Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v.conj())
    d = A.diagonal().real.copy()
    sub = A.diagonal(-1).copy()
    # diagonal unitary scaling that makes the off-diagonal real and non-negative
    phases = np.ones(n, dtype=np.complex128)
    for k in range(n - 1):
        a = abs(sub[k])
        phases[k + 1] = phases[k] * (sub[k] / a if a > 0 else 1.0)
    Q = Q * phases[None, :]
    return d, np.abs(sub), Q


def _givens(a: float, b: float) -> tuple[float, float]:
    # c, s with [c s; -s c]^T [a; b] = [r; 0]
    if b == 0.0:
        return 1.0, 0.0
    r = np.hypot(a, b)
    return a / r, -b / r


def tridiagonal_qr(d: np.ndarray, e: np.ndarray, Z: np.ndarray | None = None,
                   max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Implicit Wilkinson-shift QR on a real symmetric tridiagonal matrix.

    ``d`` is the diagonal, ``e`` the off-diagonal.  Rotations are accumulated into
    the columns of ``Z`` (identity if omitted).  Returns unsorted eigenvalues and
    the rotated ``Z``.
    """
    d = np.array(d, dtype=float)
    e = np.array(e, dtype=float)
    n = d.shape[0]
    Z = np.eye(n, dtype=np.complex128) if Z is None else np.array(Z, dtype=np.complex128)
    eps = np.finfo(float).eps
    hi = n - 1
    sweeps = 0
    while hi > 0:
        # deflate converged trailing entries
        for i in range(hi):
            if abs(e[i]) <= eps * (abs(d[i]) + abs(d[i + 1])):
                e[i] = 0.0
        if e[hi - 1] == 0.0:
            hi -= 1
            sweeps = 0
            continue
        lo = hi - 1
        while lo > 0 and e[lo - 1] != 0.0:
            lo -= 1
        sweeps += 1
        if sweeps > max_sweeps * n:
            raise SingularityError("tridiagonal QR failed to converge")
        # Wilkinson shift from the trailing 2x2 block
        delta = (d[hi - 1] - d[hi]) / 2.0
        b2 = e[hi - 1] ** 2
        sign = 1.0 if delta >= 0 else -1.0
        mu = d[hi] - b2 / (delta + sign * np.hypot(delta, e[hi - 1]))
        x = d[lo] - mu
        z = e[lo]
        for k in range(lo, hi):
            c, s = _givens(x, z)
            if k > lo:
                e[k - 1] = c * e[k - 1] - s * z
            dk, dk1, ek = d[k], d[k + 1], e[k]
            # T <- G^T T G on rows/cols k, k+1
            d[k] = c * c * dk - 2 * c * s * ek + s * s * dk1
            d[k + 1] = s * s * dk + 2 * c * s * ek + c * c * dk1
            e[k] = c * s * (dk - dk1) + (c * c - s * s) * ek
            if k < hi - 1:
                x = e[k]
                z = -s * e[k + 1]
                e[k + 1] = c * e[k + 1]
            zk = Z[:, k].copy()
            Z[:, k] = c * zk - s * Z[:, k + 1]
            Z[:, k + 1] = s * zk + c * Z[:, k + 1]
    return d, Z


def hermitian_eig(M, method: str = "lapack") -> HermEigResult:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as ``(M + M^*)/2`` before decomposition.

    Parameters
    ----------
    M : (n, n) array_like
        Hermitian matrix (within roundoff).
    method : {"lapack", "householder_qr"}
        ``"lapack"`` calls ``numpy.linalg.eigh``; ``"householder_qr"`` uses the
        in-package Householder tridiagonalization followed by implicit QR.

    Returns
    -------
    HermEigResult
        Ascending eigenvalues and orthonormal eigenvectors.
    """
    M = hermitianize(as_matrix(M, square=True))
    if method == "lapack":
        w, V = np.linalg.eigh(M)
        return HermEigResult(w, V)
    if method == "householder_qr":
        d, e, Q = householder_tridiagonalize(M)
        w, V = tridiagonal_qr(d, e, Q)
        order = np.argsort(w, kind="stable")
        return HermEigResult(w[order], V[:, order])
    raise DomainError(f"unknown method {method!r}")


def two_norm(M) -> float:
    """Largest singular value (vector 2-norm for 1-D input)."""
    M = np.asarray(M)
    if M.ndim == 1:
        return float(np.linalg.norm(as_vector(M)))
    M = as_matrix(M)
    return float(np.linalg.svd(M, compute_uv=False)[0])


def condition_number(V) -> float:
    """2-norm condition number ``sigma_max / sigma_min`` of a square matrix."""
    V = as_matrix(V, square=True)
    s = np.linalg.svd(V, compute_uv=False)
    if s[-1] <= 1e-12 * max(s[0], NORM_FLOOR):
        raise SingularityError("matrix is numerically singular")
    return float(s[0] / s[-1])


def psd_sqrt(G) -> np.ndarray:
    """Hermitian square root of a Hermitian positive semidefinite matrix."""
    w, U = hermitian_eig(G)
    w = np.clip(w, 0.0, None)
    return (U * np.sqrt(w)) @ U.conj().T


def psd_inv_sqrt(G) -> np.ndarray:
    """Inverse Hermitian square root of a Hermitian positive definite matrix."""
    w, U = hermitian_eig(G)
    if w[0] <= 1e-24 * max(w[-1], NORM_FLOOR):
        raise SingularityError("matrix is not positive definite")
    return (U / np.sqrt(w)) @ U.conj().T


def polar_decompose(B) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``B = Q H`` of a full-column-rank ``n x k`` matrix.

    ``H = (B^* B)^{1/2}`` is computed from the eigendecomposition of the Gram
    matrix and ``Q = B H^{-1}`` has orthonormal columns.
    """
    B = as_matrix(B)
    n, k = B.shape
    if k > n:
        raise DimensionError(f"polar decomposition needs rows >= cols, got {B.shape}")
    w, U = hermitian_eig(B.conj().T @ B)
    sig = np.sqrt(np.clip(w, 0.0, None))
    if sig[0] <= 1e-12 * max(sig[-1], NORM_FLOOR):
        raise SingularityError("matrix does not have full column rank")
    H = (U * sig) @ U.conj().T
    Q = B @ ((U / sig) @ U.conj().T)
    return Q, hermitianize(H)
