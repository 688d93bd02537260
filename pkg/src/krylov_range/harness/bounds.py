"""Closed-form bounds and success probabilities of the approximation theorems.

All distance bounds are absolute (already multiplied by the relevant
diameter), except ``thm_circle_upper`` whose spectrum lies on the unit circle.
Krylov dimensions are ``6m + 1`` for the half-annulus based results and
``2m + 1`` for the circle results; see :func:`krylov_dim`.
"""

from __future__ import annotations

import math

from ..errors import DomainError

__all__ = ["THEOREMS", "theorem_bound", "theorem_probability", "krylov_dim", "required_params"]

_REQUIRED = {
    "lemma_single_eig": ("m", "b_norm", "b_phi", "diam"),
    "thm_main": ("n", "m", "alpha", "diam"),
    "thm_circle_upper": ("n", "m", "alpha"),
    "thm_nonnormal": ("n", "m", "alpha", "kappa", "diam"),
    "cor_errsmall": ("n", "m", "beta", "alpha_norm", "alpha_k", "diam"),
    "thm_eigenhull": ("n", "m", "alpha", "beta", "gamma", "kappa", "diam"),
    "thm_norm_lower": ("m", "diam"),
    "thm_circle_lower": ("m",),
}
THEOREMS = tuple(_REQUIRED)


def required_params(name: str) -> tuple[str, ...]:
    if name not in _REQUIRED:
        raise DomainError(f"unknown theorem {name!r}; choose from {', '.join(THEOREMS)}")
    return _REQUIRED[name]


def _get(name: str, params: dict) -> dict:
    need = required_params(name)
    missing = [k for k in need if params.get(k) is None]
    if missing:
        raise DomainError(f"{name} needs parameter(s) {', '.join(missing)}")
    p = {k: float(params[k]) for k in need}
    if "m" in p and p["m"] < 1:
        raise DomainError("m must be >= 1")
    if "n" in p and p["n"] < 2:
        raise DomainError("n must be >= 2")
    return p


def krylov_dim(name: str, m: int) -> int:
    """Krylov dimension at which the theorem's bound for parameter ``m`` applies."""
    required_params(name)
    if name == "thm_circle_upper":
        return 2 * m + 1
    if name in ("thm_norm_lower", "thm_circle_lower"):
        return m
    return 6 * m + 1


def _errsmall_term(n: float, beta: float) -> float:
    return 2 * math.log(math.e * n) / n ** (beta / 2)


def theorem_bound(name: str, **params) -> float:
    """Evaluate the distance bound of a theorem.

    Parameters by name:

    ``lemma_single_eig``   m, b_norm (``||b||``), b_phi (``|<b, phi>|``), diam
    ``thm_main``           n, m, alpha, diam
    ``thm_circle_upper``   n, m, alpha
    ``thm_nonnormal``      n, m, alpha, kappa, diam
    ``cor_errsmall``       n, m, beta, alpha_norm (``||V^{-1} b||``), alpha_k (``|[V^{-1} b]_k|``), diam
    ``thm_eigenhull``      n, m, alpha, beta, gamma, kappa, diam
    ``thm_norm_lower``     m, diam   (lower bound ``diam / (60 m)``)
    ``thm_circle_lower``   m         (lower bound ``2 / m^2``)

    A bound whose normalizing denominator is not positive is returned as ``inf``.
    """
    p = _get(name, params)
    m = p["m"]
    if name == "lemma_single_eig":
        if p["b_phi"] <= 0:
            return math.inf
        return 6 / m * math.log(math.e * m * p["b_norm"] ** 2 / (6 * p["b_phi"] ** 2)) * p["diam"]
    if name == "thm_main":
        return 6 * (2 + p["alpha"]) * math.log(p["n"]) / m * p["diam"]
    if name == "thm_circle_upper":
        return (2 + p["alpha"]) ** 2 * math.log(p["n"]) ** 2 / (16 * m * m)
    if name == "thm_nonnormal":
        k = p["kappa"]
        if k < 1:
            raise DomainError("kappa must be >= 1")
        val = 6 * k * k / m * math.log(p["n"] ** (2 + p["alpha"]) * k * k) + 4 * k * (k - 1)
        return val * p["diam"]
    if name == "cor_errsmall":
        if p["alpha_k"] <= 0:
            return math.inf
        e = _errsmall_term(p["n"], p["beta"])
        if e >= 1:
            return math.inf
        head = 6 / m * math.log(math.e * m * p["alpha_norm"] ** 2 / (6 * p["alpha_k"] ** 2))
        return (head + e) / (1 - e) * p["diam"]
    if name == "thm_eigenhull":
        g, b = p["gamma"], p["beta"]
        if not 0 < g < min(b / 2, 0.25):
            raise DomainError("gamma must satisfy 0 < gamma < min(beta/2, 1/4)")
        e = _errsmall_term(p["n"], b)
        if e >= 1:
            return math.inf
        ng = p["n"] ** g
        head = 6 / m * math.log(p["n"] ** (2 + p["alpha"]) * p["kappa"] ** 2)
        return ((head + e) / (1 - e) + math.pi / ng * math.tan(2 * math.pi / ng)) * p["diam"]
    if name == "thm_norm_lower":
        return p["diam"] / (60 * m)
    return 2 / (m * m)


def theorem_probability(name: str, **params) -> float:
    """Success probability stated with the bound (may be negative, i.e. vacuous).

    ``thm_main``/``thm_nonnormal``: ``1 - 5m/(4 n^alpha)``;
    ``thm_circle_upper``: ``1 - 64 e^2 m^2 / n^alpha``;
    ``cor_errsmall``: ``1 - (e n^{-beta/2} + 2 n^{-1/2} + 4 n^{-1/4})``;
    ``thm_eigenhull``: ``1 - e^2 m/(6 n^alpha) - e n^{gamma - beta/2} - 2 n^{gamma - 1/2} - 4 n^{gamma - 1/4}``;
    ``thm_norm_lower``: ``1 - 2/m``; ``thm_circle_lower``: ``1 - 2/k``;
    ``lemma_single_eig`` is deterministic (1).
    """
    required_params(name)
    def need(*keys):
        miss = [k for k in keys if params.get(k) is None]
        if miss:
            raise DomainError(f"{name} probability needs {', '.join(miss)}")
        return [float(params[k]) for k in keys]

    if name == "lemma_single_eig":
        return 1.0
    if name in ("thm_main", "thm_nonnormal"):
        n, m, a = need("n", "m", "alpha")
        return 1 - 5 * m / (4 * n ** a)
    if name == "thm_circle_upper":
        n, m, a = need("n", "m", "alpha")
        return 1 - 64 * math.e ** 2 * m * m / n ** a
    if name == "cor_errsmall":
        n, b = need("n", "beta")
        return 1 - (math.e * n ** (-b / 2) + 2 / math.sqrt(n) + 4 * n ** -0.25)
    if name == "thm_eigenhull":
        n, m, a, b, g = need("n", "m", "alpha", "beta", "gamma")
        return (1 - math.e ** 2 * m / (6 * n ** a) - math.e * n ** (g - b / 2)
                - 2 * n ** (g - 0.5) - 4 * n ** (g - 0.25))
    if name == "thm_norm_lower":
        (m,) = need("m")
        return 1 - 2 / m
    (k,) = need("k")
    return 1 - 2 / k
