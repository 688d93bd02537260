"""Monte Carlo and exhaustive verifiers for the probabilistic inequalities.

Each verifier takes ``(params, trials, rng)`` and returns a
:class:`~krylov_range.ensembles.VerifyReport`.  Tail bounds pass when the
empirical probability is at most the bound; moment identities pass when the
estimate is within four Monte Carlo standard errors of the target.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .ensembles import (VerifyReport, beta_normality, beta_threshold, build_matrix,
                        MatrixSpec, sample_complex_gaussian, sample_sphere)
from .errors import DomainError
from .linalg import condition_number, polar_decompose, two_norm

__all__ = ["VERIFIERS", "chisq_bound", "subexp_bound", "general_subexp_bound", "vv_small_bound"]

# Monte Carlo batch size (rows of b drawn at once)
_BATCH = 10_000
_SE_FACTOR = 4.0


def _require_trials(trials: int, minimum: int = 1000) -> None:
    if trials < minimum:
        raise DomainError(f"need at least {minimum} trials")


def _random_matrix(n: int, rng) -> np.ndarray:
    return sample_complex_gaussian(n, rng, size=n)


def _random_hermitian(n: int, rng) -> np.ndarray:
    G = _random_matrix(n, rng)
    return (G + G.conj().T) / 2


def _quad_forms(M: np.ndarray, trials: int, rng) -> np.ndarray:
    """Samples of ``b^* M b`` for ``b ~ N_C(0, I)``."""
    n = M.shape[0]
    out = np.empty(trials, dtype=np.complex128)
    for s in range(0, trials, _BATCH):
        t = min(_BATCH, trials - s)
        B = sample_complex_gaussian(n, rng, size=t)
        out[s:s + t] = np.einsum("ti,ti->t", B.conj(), B @ M.T)
    return out


def _tail_report(name, params, trials, emp, bound, details=None) -> VerifyReport:
    emp = np.atleast_1d(np.asarray(emp, dtype=float))
    bound = np.atleast_1d(np.asarray(bound, dtype=float))
    worst = int(np.argmax(emp - bound))
    se = float(np.sqrt(max(emp[worst] * (1 - emp[worst]), 1e-300) / trials))
    d = dict(details or {})
    d.update(empirical_all=emp.tolist(), bound_all=bound.tolist())
    return VerifyReport(name, params, float(emp[worst]), float(bound[worst]),
                        bool(np.all(emp <= bound)), "tail", trials, se, d)


def chisq_bound(k: int, t: float) -> float:
    """``P[|X - k| >= k t] <= 2 exp(-k t^2 / 8)`` for ``X ~ chi^2_k``."""
    return float(2 * np.exp(-k * t * t / 8))


def verify_chisq_tail(params: dict, trials: int, rng) -> VerifyReport:
    _require_trials(trials)
    k = int(params.setdefault("k", 100))
    ts = np.atleast_1d(params.setdefault("t", 0.5)).astype(float)
    if np.any((ts <= 0) | (ts >= 1)):
        raise DomainError("t must lie in (0, 1)")
    X = rng.chisquare(k, size=trials)
    emp = [float(np.mean(np.abs(X - k) >= k * t)) for t in ts]
    return _tail_report("chisq_tail", params, trials, emp, [chisq_bound(k, t) for t in ts])


def verify_min_coord(params: dict, trials: int, rng) -> VerifyReport:
    """``P[min_j |[Mb]_j|^2 / ||Mb||^2 >= t/(n^2 kappa^2)] >= 1 - e t``, checked as a failure rate."""
    _require_trials(trials)
    n = int(params.setdefault("n", 20))
    ts = np.atleast_1d(params.setdefault("t", [0.05, 0.1, 0.3])).astype(float)
    M = _random_matrix(n, rng)
    kappa = condition_number(M)
    stat = np.empty(trials)
    for s in range(0, trials, _BATCH):
        t = min(_BATCH, trials - s)
        Y = sample_sphere(n, rng, size=t) @ M.T
        a = np.abs(Y) ** 2
        stat[s:s + t] = a.min(axis=1) / a.sum(axis=1)
    emp = [float(np.mean(stat < t / (n * n * kappa * kappa))) for t in ts]
    return _tail_report("min_coord", params, trials, emp, np.e * ts, {"kappa": kappa})


def _moment_check(est, target, se) -> bool:
    return abs(est - target) <= _SE_FACTOR * se


def verify_quad_form_stats(params: dict, trials: int, rng) -> VerifyReport:
    """``E[b^* M b] = trace M`` and ``Var[b^* M b] = ||M||_F^2`` for normal ``M``."""
    _require_trials(trials)
    n = int(params.setdefault("n", 20))
    kind = params.setdefault("matrix", "hermitian")
    if kind == "hermitian":
        M = _random_hermitian(n, rng)
    elif kind == "normal":
        U, _ = np.linalg.qr(_random_matrix(n, rng))
        M = (U * sample_complex_gaussian(n, rng)) @ U.conj().T
    else:
        raise DomainError("matrix must be 'hermitian' or 'normal'")
    X = _quad_forms(M, trials, rng)
    tr = complex(np.trace(M))
    fro2 = float(np.linalg.norm(M) ** 2)
    mean = X.mean()
    dev = np.abs(X - mean) ** 2
    var = float(dev.mean() * trials / (trials - 1))
    se_mean = float(np.sqrt(var / trials))
    se_var = float(dev.std(ddof=1) / np.sqrt(trials))
    ok_mean = _moment_check(mean, tr, se_mean)
    ok_var = _moment_check(var, fro2, se_var)
    details = {"mean": [mean.real, mean.imag], "trace": [tr.real, tr.imag],
               "var": var, "fro2": fro2, "se_mean": se_mean, "se_var": se_var,
               "mean_ok": ok_mean, "var_ok": ok_var}
    # headline number: the variance identity, normalized error in SE units
    return VerifyReport("quad_form_stats", params, var, fro2, bool(ok_mean and ok_var),
                        "moment", trials, se_var, details)


def subexp_bound(t, fro: float, op: float):
    """``2 exp(-min(t^2 / (4 ||M||_F^2), t / (4 ||M||_2)))``."""
    t = np.asarray(t, dtype=float)
    return 2 * np.exp(-np.minimum(t * t / (4 * fro * fro), t / (4 * op)))


def general_subexp_bound(t, var: float, op: float):
    """``4 exp(-min(t^2 / (8 Var), t / (4 sqrt(2) ||M||_2)))``."""
    t = np.asarray(t, dtype=float)
    return 4 * np.exp(-np.minimum(t * t / (8 * var), t / (4 * np.sqrt(2) * op)))


def verify_subexp_tail(params: dict, trials: int, rng) -> VerifyReport:
    """Sub-exponential tail of ``b^* M b``.

    ``matrix="hermitian"`` (default) checks the Hermitian bound; ``"general"``
    checks the variance identity ``||M_1||_F^2 + ||M_2||_F^2`` and the
    four-term bound for an arbitrary ``M``.
    """
    _require_trials(trials)
    n = int(params.setdefault("n", 20))
    kind = params.setdefault("matrix", "hermitian")
    mult = np.atleast_1d(params.setdefault("t_over_fro", [0.5, 1.0, 2.0, 3.0, 4.0])).astype(float)
    if kind == "hermitian":
        M = _random_hermitian(n, rng)
    elif kind == "general":
        M = _random_matrix(n, rng)
    else:
        raise DomainError("matrix must be 'hermitian' or 'general'")
    X = _quad_forms(M, trials, rng)
    dev = np.abs(X - np.trace(M))
    op = two_norm(M)
    fro = float(np.linalg.norm(M))
    ts = mult * fro
    emp = [float(np.mean(dev >= t)) for t in ts]
    details = {"fro": fro, "op": op}
    if kind == "hermitian":
        return _tail_report("subexp_tail", params, trials, emp, subexp_bound(ts, fro, op), details)
    M1, M2 = (M + M.conj().T) / 2, (M - M.conj().T) / 2
    var_target = float(np.linalg.norm(M1) ** 2 + np.linalg.norm(M2) ** 2)
    d2 = dev ** 2
    var = float(d2.mean())
    se_var = float(d2.std(ddof=1) / np.sqrt(trials))
    details.update(var=var, var_target=var_target, se_var=se_var,
                   var_ok=_moment_check(var, var_target, se_var))
    rep = _tail_report("subexp_tail", params, trials, emp,
                       general_subexp_bound(ts, var_target, op), details)
    rep.passed = rep.passed and details["var_ok"]
    return rep


def verify_anticoncentration(params: dict, trials: int, rng) -> VerifyReport:
    """``P[b^* M b <= t trace M] <= e t`` for positive definite ``M``.

    ``M`` has a random eigenbasis and eigenvalues ``decay^j``.
    """
    _require_trials(trials)
    n = int(params.setdefault("n", 20))
    ts = np.atleast_1d(params.setdefault("t", [0.01, 0.05, 0.1])).astype(float)
    decay = float(params.setdefault("decay", 0.05))
    if not 0.0 < decay <= 1.0:
        raise DomainError("decay must lie in (0, 1]")
    # eigenvalues decay^j: small decay approaches the extremal rank-one case,
    # where the tail is largest
    U, _ = np.linalg.qr(_random_matrix(n, rng))
    M = (U * decay ** np.arange(n)) @ U.conj().T
    X = _quad_forms(M, trials, rng).real
    tr = float(np.trace(M).real)
    emp = [float(np.mean(X <= t * tr)) for t in ts]
    return _tail_report("anticoncentration", params, trials, emp, np.e * ts)


def verify_power_sum(params: dict, trials: int, rng) -> VerifyReport:
    """Exhaustive check of ``sum j^{k+1} < (n - 1/(e+1)) sum j^k`` for all ``k < n <= n_max``.

    Power sums are exact integers; the margin ``(n S_k - S_{k+1}) / S_k`` is a
    rational compared against ``1/(e+1)``.
    """
    n_max = int(params.setdefault("n_max", 50))
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    target = 1 / (np.e + 1)
    worst = None
    count = 0
    for n in range(2, n_max + 1):
        for k in range(1, n):
            s_k = sum(j ** k for j in range(1, n + 1))
            s_k1 = sum(j ** (k + 1) for j in range(1, n + 1))
            margin = Fraction(n * s_k - s_k1, s_k)
            count += 1
            if worst is None or margin < worst[0]:
                worst = (margin, n, k)
    margin, n_w, k_w = worst
    return VerifyReport("power_sum", params, float(margin), float(target),
                        bool(float(margin) > target), "exhaustive", count, 0.0,
                        {"worst_n": n_w, "worst_k": k_w})


def verify_polar_perturb(params: dict, trials: int, rng) -> VerifyReport:
    """``||V^* A V - Q^* A Q|| <= 4 ||A|| ||D|| / (1 - ||D||)`` with ``QH`` the polar factor of ``(I+D)V``.

    ``trials`` random instances; the report gives the largest lhs/rhs ratio.
    """
    rows = int(params.setdefault("rows", 12))
    cols = int(params.setdefault("cols", 5))
    dmax = float(params.setdefault("d_max", 0.9))
    if trials < 1 or cols > rows:
        raise DomainError("need trials >= 1 and cols <= rows")
    worst = 0.0
    for _ in range(trials):
        V, _ = np.linalg.qr(sample_complex_gaussian(rows, rng, size=cols).T)
        A = _random_matrix(rows, rng)
        dn = rng.uniform(0.0, dmax)
        d = sample_complex_gaussian(rows, rng)
        d = d / np.abs(d).max() * dn
        Q, _ = polar_decompose((1 + d)[:, None] * V)
        lhs = two_norm(V.conj().T @ A @ V - Q.conj().T @ A @ Q)
        rhs = 4 * two_norm(A) * dn / (1 - dn)
        worst = max(worst, lhs / rhs)
    return VerifyReport("polar_perturb", params, worst, 1.0, bool(worst <= 1.0), "tail",
                        trials, 0.0, {})


def vv_small_bound(n: int, beta: float) -> float:
    """``e n^{-beta/2} + 2 n^{-1/2} + 4 n^{-1/4}``."""
    return float(np.e * n ** (-beta / 2) + 2 / np.sqrt(n) + 4 * n ** -0.25)


def verify_vv_small(params: dict, trials: int, rng) -> VerifyReport:
    """Failure rate of the ``V^* V`` removal estimate for a beta-normal ``V``.

    The event is
    ``|y^* G D y / y^* G y| >= (|y^* D y / y^* y| + eps) / (1 - eps)`` with
    ``y = P V^{-1} b``, ``G = V^* V`` and ``eps = 2 n^{-beta/2} ln(e n)``.  When
    ``eps >= 1`` the right side is not a positive number and every trial is
    counted as a failure.  ``P`` and ``D`` are random diagonal matrices with
    entries of modulus at most one, drawn once.

    ``params["matrix"]`` is a :class:`MatrixSpec` dict (default the
    correlated-eigenvector example at ``n = 1024``); alternatively pass
    ``V`` and ``V_inv`` arrays directly.
    """
    _require_trials(trials)
    if "V" in params:
        V = np.asarray(params.pop("V"), dtype=np.complex128)
        V_inv = np.asarray(params.pop("V_inv"), dtype=np.complex128)
        params["matrix"] = "explicit"
    else:
        spec = params.setdefault("matrix", {"kind": "correlated_eigvecs", "m": 16, "ell": 4})
        built = build_matrix(MatrixSpec.from_dict(dict(spec)))
        V, V_inv = built.V, built.V_inv
    n = V.shape[0]
    rep = beta_normality(V, V_inv)
    beta = rep.beta_star
    eps = 2 * n ** (-beta / 2) * np.log(np.e * n) if np.isfinite(beta) else 0.0
    P = rng.uniform(0, 1, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    D = rng.uniform(0, 1, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    G = V.conj().T @ V
    fails = 0
    for s in range(0, trials, 1000):
        t = min(1000, trials - s)
        B = sample_sphere(n, rng, size=t).T
        Y = P[:, None] * (V_inv @ B)
        GY = G @ Y
        den_g = np.einsum("it,it->t", Y.conj(), GY).real
        lhs = np.abs(np.einsum("it,it->t", GY.conj(), D[:, None] * Y)) / den_g
        yy = np.einsum("it,it->t", Y.conj(), Y).real
        rhs = np.abs(np.einsum("it,it->t", Y.conj(), D[:, None] * Y)) / yy
        if eps >= 1:
            fails += t
        else:
            fails += int(np.sum(lhs >= (rhs + eps) / (1 - eps)))
    emp = fails / trials
    bound = vv_small_bound(n, beta) if np.isfinite(beta) else vv_small_bound(n, np.inf)
    se = float(np.sqrt(max(emp * (1 - emp), 1e-300) / trials))
    details = {"n": n, "beta_star": beta, "eps": float(eps), "beta_threshold": float(beta_threshold(n)),
               "hypothesis_ok": bool(beta > beta_threshold(n))}
    return VerifyReport("vv_small", params, float(emp), bound,
                        bool(emp <= bound + _SE_FACTOR * se), "tail", trials, se, details)


VERIFIERS = {
    "chisq_tail": verify_chisq_tail,
    "min_coord": verify_min_coord,
    "quad_form_stats": verify_quad_form_stats,
    "subexp_tail": verify_subexp_tail,
    "anticoncentration": verify_anticoncentration,
    "power_sum": verify_power_sum,
    "polar_perturb": verify_polar_perturb,
    "vv_small": verify_vv_small,
}
