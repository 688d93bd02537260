"""Random sampling, named test matrices and eigenvector diagnostics.

Randomness goes through :func:`make_rng`, which seeds a PCG64 generator from
``SeedSequence(seed, spawn_key=stream)``.  Trial ``t`` of an experiment with
seed ``s`` uses ``make_rng(s, t)``, so every trial has its own stream no matter
how trials are scheduled across processes.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.sparse.linalg import LinearOperator

from .errors import DomainError, PreconditionError, SingularityError
from .linalg import as_matrix, psd_inv_sqrt, psd_sqrt, two_norm

__all__ = [
    "make_rng",
    "sample_complex_gaussian",
    "sample_sphere",
    "MatrixSpec",
    "BuiltMatrix",
    "build_matrix",
    "BetaNormalReport",
    "beta_normality",
    "beta_threshold",
    "convtonum_bound",
    "near_orthonormal_basis",
    "verify_prob",
    "VerifyReport",
]

MATRIX_KINDS = ("roots_of_unity", "laplacian_1d", "radial_roots", "circle_mult",
                "ellipse_rank1", "correlated_eigvecs", "explicit")


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for ``seed`` and an optional stream path (e.g. trial index)."""
    if int(seed) != seed or seed < 0 or seed >= 2 ** 64:
        raise DomainError("seed must be an unsigned 64-bit integer")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.PCG64(ss))


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(int(rng))


def sample_complex_gaussian(n: int, rng, size: int | None = None) -> np.ndarray:
    """Standard complex normal entries: real and imaginary parts i.i.d. ``N(0, 1/2)``.

    Returns shape ``(n,)`` or ``(size, n)``.
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    rng = _as_rng(rng)
    shape = (int(n),) if size is None else (int(size), int(n))
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * np.sqrt(0.5)


def sample_sphere(n: int, rng, size: int | None = None) -> np.ndarray:
    """Uniform sample(s) from the unit sphere of ``C^n``."""
    g = sample_complex_gaussian(n, rng, size)
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


@dataclass(frozen=True)
class MatrixSpec:
    """Description of a test matrix.

    Parameters by kind:

    * ``roots_of_unity``: ``n``
    * ``laplacian_1d``: ``n``
    * ``radial_roots``: ``m, ell`` (``n = ell m^2``)
    * ``circle_mult``: ``k, ell`` (``n = k ell``)
    * ``ellipse_rank1``: ``n, gamma``
    * ``correlated_eigvecs``: ``m, ell`` (eigenvalues as ``radial_roots``)
    * ``explicit``: ``entries`` (nested list of complex, or ``[re, im]`` pairs)
    """

    kind: str
    n: int | None = None
    m: int | None = None
    k: int | None = None
    ell: int | None = None
    gamma: float | None = None
    entries: Any = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in MATRIX_KINDS:
            raise DomainError(f"unknown matrix kind {self.kind!r}")

        def need(*names):
            for name in names:
                v = getattr(self, name)
                if v is None:
                    raise DomainError(f"{self.kind} requires parameter {name!r}")
                if name != "gamma" and (int(v) != v or v < 1):
                    raise DomainError(f"{name} must be a positive integer")

        kind = self.kind
        if kind in ("roots_of_unity", "laplacian_1d"):
            need("n")
        elif kind in ("radial_roots", "correlated_eigvecs"):
            need("m", "ell")
            if self.n is not None and self.n != self.ell * self.m ** 2:
                raise DomainError("need n = ell * m^2")
            object.__setattr__(self, "n", self.ell * self.m ** 2)
        elif kind == "circle_mult":
            need("k", "ell")
            if self.n is not None and self.n != self.k * self.ell:
                raise DomainError("need n = k * ell")
            object.__setattr__(self, "n", self.k * self.ell)
        elif kind == "ellipse_rank1":
            need("n", "gamma")
            if self.n < 2 or self.gamma <= 0:
                raise DomainError("ellipse_rank1 needs n >= 2 and gamma > 0")
        else:
            if self.entries is None:
                raise DomainError("explicit matrix requires entries")
            a = _parse_entries(self.entries)
            if a.shape[0] != a.shape[1]:
                raise DomainError("explicit matrix must be square")
            object.__setattr__(self, "n", a.shape[0])

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        if self.entries is not None:
            a = _parse_entries(self.entries)
            d["entries"] = [[[float(z.real), float(z.imag)] for z in row] for row in a]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MatrixSpec":
        allowed = {"kind", "n", "m", "k", "ell", "gamma", "entries"}
        extra = set(d) - allowed
        if extra:
            raise DomainError(f"unknown matrix spec fields {sorted(extra)}")
        return cls(**d)


def _parse_entries(entries) -> np.ndarray:
    a = np.asarray(entries)
    if a.ndim == 3 and a.shape[-1] == 2 and not np.iscomplexobj(a):
        a = a[..., 0] + 1j * a[..., 1]
    return as_matrix(a)


@dataclass
class BuiltMatrix:
    """A test matrix with its eigendecomposition ``A = V diag(eigenvalues) V^{-1}``.

    ``A`` is a dense array, a scipy sparse matrix or a ``LinearOperator``.
    ``V is None`` marks an identity eigenvector matrix (diagonal ``A``).
    ``normal`` is True when ``V`` can be taken unitary, in which case
    ``W(A)`` is the convex hull of the eigenvalues.
    """

    spec: MatrixSpec
    A: Any
    eigenvalues: np.ndarray
    V: np.ndarray | None
    V_inv: np.ndarray | None
    normal: bool

    @property
    def n(self) -> int:
        return int(self.eigenvalues.size)

    def dense(self) -> np.ndarray:
        A = self.A
        if scipy.sparse.issparse(A):
            return A.toarray().astype(np.complex128)
        if isinstance(A, LinearOperator):
            if self.V is None:
                return np.diag(self.eigenvalues)
            return (self.V * self.eigenvalues) @ self.V_inv
        return np.asarray(A, dtype=np.complex128)


def _radial_eigs(m: int, ell: int) -> np.ndarray:
    r = np.sqrt(np.arange(1, m + 1) / m)
    theta = np.exp(2j * np.pi * np.arange(1, m + 1) / m)
    return np.kron(np.kron(r, theta), np.ones(ell))


def build_matrix(spec: MatrixSpec) -> BuiltMatrix:
    """Materialize a :class:`MatrixSpec`.

    Diagonal and diagonal-plus-rank-one matrices are stored as sparse CSR; the
    correlated-eigenvector matrix is a ``LinearOperator`` applying
    ``V diag(lambda) V^{-1}`` in ``O(n)`` using its closed form.
    """
    kind, n = spec.kind, spec.n
    if kind == "roots_of_unity":
        lam = np.exp(2j * np.pi * np.arange(1, n + 1) / n)
        return BuiltMatrix(spec, scipy.sparse.diags(lam, format="csr"), lam, None, None, True)
    if kind == "laplacian_1d":
        j = np.arange(1, n + 1)
        lam = (2 - 2 * np.cos(j * np.pi / (n + 1))).astype(np.complex128)
        A = scipy.sparse.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1],
                               format="csr", dtype=np.complex128)
        V = np.sqrt(2 / (n + 1)) * np.sin(np.outer(j, j) * np.pi / (n + 1)) + 0j
        return BuiltMatrix(spec, A, lam, V, V.conj().T, True)
    if kind == "radial_roots":
        lam = _radial_eigs(spec.m, spec.ell)
        return BuiltMatrix(spec, scipy.sparse.diags(lam, format="csr"), lam, None, None, True)
    if kind == "circle_mult":
        theta = np.exp(2j * np.pi * np.arange(1, spec.k + 1) / spec.k)
        lam = np.kron(theta, np.ones(spec.ell))
        return BuiltMatrix(spec, scipy.sparse.diags(lam, format="csr"), lam, None, None, True)
    if kind == "ellipse_rank1":
        g = float(spec.gamma)
        lam = np.cos(np.arange(n) * np.pi / (n - 1)) + 0j
        A = scipy.sparse.diags(lam, format="lil", dtype=np.complex128)
        A[0, n - 1] = g
        # eigenvectors: e_j, except the last which is (e_n - (gamma/2) e_1)/sqrt(1 + gamma^2/4)
        s = np.sqrt(1 + g * g / 4)
        V = np.eye(n, dtype=np.complex128)
        V[0, n - 1] = -g / 2 / s
        V[n - 1, n - 1] = 1 / s
        V_inv = np.eye(n, dtype=np.complex128)
        V_inv[0, n - 1] = g / 2
        V_inv[n - 1, n - 1] = s
        return BuiltMatrix(spec, A.tocsr(), lam, V, V_inv, False)
    if kind == "correlated_eigvecs":
        lam = _radial_eigs(spec.m, spec.ell)
        c = float(n) ** (-2.0 / 3.0)
        # V = sqrt(G) for G = (1 - c) I + c 11^T, in closed form a I + b 11^T
        a = np.sqrt(1 - c)
        b = (np.sqrt(1 - c + c * n) - a) / n
        bi = (1 / np.sqrt(1 - c + c * n) - 1 / a) / n
        V = a * np.eye(n, dtype=np.complex128) + b
        V_inv = np.eye(n, dtype=np.complex128) / a + bi

        def apply(x, adjoint=False):
            # V = a I + b 11^T and V^{-1} = I/a + bi 11^T are both real symmetric
            x = np.asarray(x, dtype=np.complex128)
            if not adjoint:
                y = lam.reshape((n,) + (1,) * (x.ndim - 1)) * (x / a + bi * x.sum(axis=0))
                return a * y + b * y.sum(axis=0)
            y = lam.conj().reshape((n,) + (1,) * (x.ndim - 1)) * (a * x + b * x.sum(axis=0))
            return y / a + bi * y.sum(axis=0)

        A = LinearOperator((n, n), matvec=apply, rmatvec=lambda x: apply(x, True),
                           matmat=apply, rmatmat=lambda x: apply(x, True), dtype=np.complex128)
        return BuiltMatrix(spec, A, lam, V, V_inv, False)
    # explicit
    A = _parse_entries(spec.entries)
    comm = A @ A.conj().T - A.conj().T @ A
    scale = max(two_norm(A), 1e-300)
    lam, V = np.linalg.eig(A)
    if np.linalg.norm(comm) <= 1e-10 * scale * scale:
        # normal: use a unitary eigenbasis from the Schur form
        T, Z = scipy.linalg.schur(A, output="complex")
        lam = np.diag(T).copy()
        return BuiltMatrix(spec, A, lam, Z, Z.conj().T, True)
    V = V / np.linalg.norm(V, axis=0, keepdims=True)
    s = np.linalg.svd(V, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise SingularityError("explicit matrix is not (numerically) diagonalizable")
    return BuiltMatrix(spec, A, lam, V, np.linalg.inv(V), False)


@dataclass(frozen=True)
class BetaNormalReport:
    """Result of :func:`beta_normality`.

    ``beta_star`` solves ``n^{-beta} = max_ratio`` where ``max_ratio`` is the
    largest normalized left side over all ``(j, k)``.  It is ``inf`` when the
    left side vanishes identically (orthonormal columns) and non-positive when
    no ``beta > 0`` satisfies the definition.
    """

    beta_star: float
    worst_pair: tuple[int, int]
    max_ratio: float
    n: int

    @property
    def is_beta_normal(self) -> bool:
        return self.beta_star > 0

    def to_dict(self) -> dict:
        return {"beta_star": self.beta_star, "worst_pair": list(self.worst_pair),
                "max_ratio": self.max_ratio, "n": self.n,
                "is_beta_normal": self.is_beta_normal}


def beta_normality(V, V_inv=None, tol: float = 1e-9) -> BetaNormalReport:
    """Largest ``beta`` for which ``V`` is beta-normal.

    With ``v_k`` the columns of ``V`` and ``w_j`` the columns of ``W = V^{-*}``,
    the left side for the pair ``(j, k)`` is
    ``sum_{l != k} |v_k^* v_l| (|w_l^* w_j| + |w_k^* w_j|)``, compared against
    ``n^{-beta} ||w_j||^2``.  All ``n^2`` pairs are evaluated exactly with two
    matrix products.  Column inner products below ``16 n`` machine epsilons are
    treated as zero, so an orthonormal ``V`` reports ``beta_star = inf``.
    """
    V = as_matrix(V, square=True)
    n = V.shape[0]
    if n < 2:
        raise DomainError("need n >= 2")
    norms = np.linalg.norm(V, axis=0)
    if np.max(np.abs(norms - 1)) > tol:
        raise PreconditionError("columns of V must have unit norm")
    if V_inv is None:
        s = np.linalg.svd(V, compute_uv=False)
        if s[-1] <= 1e-12 * s[0]:
            raise PreconditionError("V is singular")
        V_inv = np.linalg.inv(V)
    V_inv = as_matrix(V_inv, square=True)
    if np.abs(V_inv @ V - np.eye(n)).max() > 1e-8:
        raise PreconditionError("V_inv is not the inverse of V")
    Gv = np.abs(V.conj().T @ V)
    np.fill_diagonal(Gv, 0.0)
    # inner products at the rounding floor of unit vectors count as exact zeros
    Gv[Gv <= 16 * n * np.finfo(float).eps] = 0.0
    # W^* W = V^{-1} V^{-*}
    Gw_c = V_inv @ V_inv.conj().T
    Gw = np.abs(Gw_c)
    wn = Gw_c.diagonal().real
    # T[k, j] = sum_l Gv[k, l] Gw[l, j] + (sum_l Gv[k, l]) Gw[k, j]
    T = Gv @ Gw + Gv.sum(axis=1)[:, None] * Gw
    R = T / wn[None, :]
    k, j = np.unravel_index(int(np.argmax(R)), R.shape)
    mx = float(R[k, j])
    beta = np.inf if mx == 0.0 else -np.log(mx) / np.log(n)
    return BetaNormalReport(float(beta), (int(j), int(k)), mx, n)


def beta_threshold(n: int) -> float:
    """Smallest admissible ``beta``: ``2 ln(2 ln(e n)) / ln n``."""
    return float(2 * np.log(2 * np.log(np.e * n)) / np.log(n))


def convtonum_bound(V, eigenvalues=None) -> float:
    """``||V||_2 ||(V^*V)^{-1/2} - I||_2 + ||(V^*V)^{1/2} - I||_2``.

    Bounds ``d_H(conv(Lambda), W(A))`` for ``A = V Lambda V^{-1}`` with
    ``max |lambda| <= 1``.
    """
    V = as_matrix(V, square=True)
    if eigenvalues is not None and np.max(np.abs(eigenvalues)) > 1 + 1e-12:
        raise PreconditionError("eigenvalues must satisfy |lambda| <= 1")
    s = np.linalg.svd(V, compute_uv=False)
    if s[-1] <= 1e-12 * max(s[0], 1e-300):
        raise SingularityError("V is singular")
    G = V.conj().T @ V
    eye = np.eye(V.shape[0])
    return float(s[0] * two_norm(psd_inv_sqrt(G) - eye) + two_norm(psd_sqrt(G) - eye))


def near_orthonormal_basis(n: int, eta: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Unit-column perturbation of the identity, ``I + eta G`` with ``G`` complex Gaussian / sqrt(n).

    Returns ``(V, V^{-1})``.  For small ``eta`` this is beta-normal with large beta.
    """
    G = sample_complex_gaussian(n, rng, size=n) / np.sqrt(n)
    V = np.eye(n) + eta * G
    V = V / np.linalg.norm(V, axis=0, keepdims=True)
    return V, np.linalg.inv(V)


@dataclass
class VerifyReport:
    """Monte Carlo (or exhaustive) check of one probabilistic statement."""

    name: str
    params: dict
    empirical: float
    bound: float
    passed: bool
    kind: str
    trials: int
    se: float = 0.0
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def verify_prob(name: str, params: dict | None = None, trials: int = 100_000, rng=0) -> VerifyReport:
    """Run the named verifier; see :mod:`krylov_range.probability`."""
    from .probability import VERIFIERS

    if name not in VERIFIERS:
        raise DomainError(f"unknown verifier {name!r}")
    return VERIFIERS[name](dict(params or {}), int(trials), _as_rng(rng))
