"""Scenario runners: Arnoldi trials, certification sweeps and result files.

Every trial scenario follows the same pipeline per seed: build the matrix,
draw ``b`` uniformly on the sphere from ``make_rng(seed)``, run Arnoldi once
to the largest dimension needed and take leading blocks for the smaller ones.
Numerical ranges of ``H_m`` come from the angle sweep; ``W(A)`` is the hull
of the eigenvalues for normal ``A`` and the sweep otherwise.

CSV schemas (one row per ``(seed, m)``; every trial table ends with
``breakdown, error``):

``fig1``            seed, m, dH_ritz, dH_range, m_dH_ritz, m2_dH_range, sweep_err
``fig3_radial``     seed, m, d_boundary, m_d_boundary, dH_range, sweep_err
``fig3_circle``     seed, m, d_boundary, m2_d_boundary, dH_range, sweep_err
``fig4_nonnormal``  seed, m, dH_range, dtH_hull, inclusion_err, sweep_err, bound
``fig5_beta``       seed, m, dtH_hull, m_dtH_hull, sweep_err
``bound_check``     seed, m, dim, target, bound, within_bound, interval_gap, sweep_err
``poly_certify``    family, params, value_at_point, max_on_region, ratio, factor, pass
``prob_verify``     name, kind, trials, empirical, bound, se, pass

Here ``dH_range = d_H(W(H_m), W(A))``, ``dtH_hull = sup_{z in conv(Lambda)} d(z, W(H_m))``,
``d_boundary = d(W(H_m), boundary W(A))``, ``dH_ritz = d_H(conv(Lambda(H_m)), conv(Lambda(A)))``,
``inclusion_err = sup_{z in W(H_m)} d(z, W(A))`` and ``sweep_err`` is the
inner/outer gap of the swept ``W(H_m)``.  ``m_X`` and ``m2_X`` are ``m X`` and
``m^2 X``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..convexgeom import (ConvexPolygon, SweepConfig, boundary_distance, convex_hull, diameter, hausdorff,
                          interval_gaps, numerical_range_bounds, one_sided_hausdorff,
                          point_distance)
from ..ensembles import (BuiltMatrix, MatrixSpec, beta_normality, build_matrix, make_rng,
                         sample_sphere, verify_prob)
from ..errors import ConfigError, KrylovRangeError
from ..extremal_polys import PolySpec, certify_appendix_map, certify_remez
from ..krylov import arnoldi
from ..linalg import condition_number
from ..probability import VERIFIERS
from .bounds import krylov_dim, theorem_bound, theorem_probability
from .config import ExperimentConfig
from .svg import line_plot, polygon_plot

__all__ = ["TrialRecord", "ScenarioResult", "run_scenario", "write_outputs", "range_report",
           "COLUMNS", "default_poly_cases", "default_appendix_deltas"]

_TAIL = ["breakdown", "error"]
COLUMNS = {
    "fig1": ["seed", "m", "dH_ritz", "dH_range", "m_dH_ritz", "m2_dH_range", "sweep_err"] + _TAIL,
    "fig3_radial": ["seed", "m", "d_boundary", "m_d_boundary", "dH_range", "sweep_err"] + _TAIL,
    "fig3_circle": ["seed", "m", "d_boundary", "m2_d_boundary", "dH_range", "sweep_err"] + _TAIL,
    "fig4_nonnormal": ["seed", "m", "dH_range", "dtH_hull", "inclusion_err", "sweep_err", "bound"] + _TAIL,
    "fig5_beta": ["seed", "m", "dtH_hull", "m_dtH_hull", "sweep_err"] + _TAIL,
    "bound_check": ["seed", "m", "dim", "target", "bound", "within_bound", "interval_gap",
                    "sweep_err"] + _TAIL,
    "poly_certify": ["family", "params", "value_at_point", "max_on_region", "ratio", "factor", "pass"],
    "prob_verify": ["name", "kind", "trials", "empirical", "bound", "se", "pass"],
}
_NORMAL_ONLY = ("fig1", "fig3_radial", "fig3_circle")
_NORMAL_THEOREMS = ("thm_main", "thm_circle_upper", "lemma_single_eig")
# absolute floor added to sweep tolerances (roundoff in x^* H x)
_ROUNDOFF = 1e-11


@dataclass
class TrialRecord:
    """Measurements for one ``(seed, m)``; ``m`` is the scenario parameter, ``dim`` the Krylov dimension."""

    seed: int
    m: int
    dim: int
    measured: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    wall_time: float = 0.0
    breakdown: bool = False
    error: str | None = None

    def value(self, column: str):
        if column in ("seed", "m", "dim", "breakdown", "error"):
            return getattr(self, column)
        if column.startswith("m2_"):
            v = self.measured.get(column[3:])
            return None if v is None else self.dim ** 2 * v
        if column.startswith("m_"):
            v = self.measured.get(column[2:])
            return None if v is None else self.dim * v
        if column == "bound":
            return next(iter(self.bounds.values()), None)
        if column == "within_bound":
            return self.measured.get("within_bound")
        return self.measured.get(column)

    def to_dict(self) -> dict:
        # wall_time is kept out so result files are reproducible byte for byte
        return {"seed": self.seed, "m": self.m, "dim": self.dim,
                "measured": {k: _jsonable(v) for k, v in sorted(self.measured.items())},
                "bounds": {k: _jsonable(v) for k, v in sorted(self.bounds.items())},
                "breakdown": self.breakdown, "error": self.error}


@dataclass
class ScenarioResult:
    """Output of :func:`run_scenario`."""

    config: ExperimentConfig
    records: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    figures: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


# ----------------------------------------------------------------------------
# per-matrix context


@dataclass
class _Context:
    """Data shared by all seeds: reference ranges and theorem constants."""

    n: int
    dims: dict
    normal: bool
    eig_hull: ConvexPolygon
    W_A: ConvexPolygon | None
    W_A_err: float
    diam: float
    kappa: float | None = None
    beta: float | None = None
    extreme: int = 0
    V_col: np.ndarray | None = None
    V_inv_row: np.ndarray | None = None


def _scenario_dims(cfg: ExperimentConfig) -> dict:
    if cfg.scenario == "bound_check":
        th = cfg.params["theorem"]
        return {m: krylov_dim(th, m) for m in cfg.m_values}
    return {m: m for m in cfg.m_values}


def _prepare(cfg: ExperimentConfig, built: BuiltMatrix) -> _Context:
    lam = built.eigenvalues
    hull = convex_hull(lam)
    sc = cfg.scenario
    theorem = cfg.params.get("theorem")
    if sc in _NORMAL_ONLY or theorem in _NORMAL_THEOREMS:
        if not built.normal:
            raise ConfigError(f"{theorem or sc} needs a normal matrix")
    W_A, W_err = None, 0.0
    if built.normal:
        W_A = hull
    elif sc == "fig4_nonnormal" or theorem == "thm_nonnormal":
        rb = numerical_range_bounds(built.A, cfg.sweep)
        W_A, W_err = rb.inner, rb.sweep_error
    ctx = _Context(n=built.n, dims=_scenario_dims(cfg), normal=built.normal, eig_hull=hull,
                   W_A=W_A, W_A_err=W_err, diam=diameter(hull))
    if not built.normal and built.V is not None:
        V = built.V / np.linalg.norm(built.V, axis=0, keepdims=True)
        ctx.kappa = condition_number(V)
    elif built.normal:
        ctx.kappa = 1.0
    if theorem in ("cor_errsmall", "thm_eigenhull") or sc == "fig5_beta":
        if built.V is None:
            ctx.beta = math.inf
        else:
            ctx.beta = beta_normality(built.V, built.V_inv).beta_star
    # extreme eigenvalue: largest real part, first index on ties
    ctx.extreme = int(np.argmax(lam.real))
    if theorem in ("lemma_single_eig", "cor_errsmall"):
        k = ctx.extreme
        n = built.n
        if built.V is None:
            ctx.V_col = np.eye(1, n, k).ravel().astype(np.complex128)
            ctx.V_inv_row = ctx.V_col.copy()
        else:
            ctx.V_col = built.V[:, k].copy()
            Vi = built.V_inv if built.V_inv is not None else np.linalg.inv(built.V)
            ctx.V_inv_row = Vi[k, :].copy()
    return ctx


# ----------------------------------------------------------------------------
# trials

_BUILT_CACHE: dict = {}


def _built_for(spec: MatrixSpec) -> BuiltMatrix:
    key = json.dumps(spec.to_dict(), sort_keys=True)
    if key not in _BUILT_CACHE:
        _BUILT_CACHE.clear()
        _BUILT_CACHE[key] = build_matrix(spec)
    return _BUILT_CACHE[key]


def _bound_params(cfg: ExperimentConfig, ctx: _Context, m: int, b: np.ndarray) -> dict:
    th = cfg.params["theorem"]
    p = {"n": ctx.n, "m": m, "alpha": cfg.alpha, "diam": ctx.diam, "kappa": ctx.kappa,
         "beta": ctx.beta}
    if th == "lemma_single_eig":
        p["b_norm"] = float(np.linalg.norm(b))
        p["b_phi"] = float(abs(np.vdot(ctx.V_col, b)))
    if th == "cor_errsmall":
        p["alpha_norm"] = float(np.linalg.norm(_v_inv_b(cfg, b)))
        p["alpha_k"] = float(abs(ctx.V_inv_row @ b))
    if th == "thm_eigenhull":
        p["gamma"] = _eigenhull_gamma(cfg, ctx)
    return p


def _v_inv_b(cfg: ExperimentConfig, b: np.ndarray) -> np.ndarray:
    built = _built_for(cfg.matrix)
    if built.V is None:
        return b
    if built.V_inv is not None:
        return built.V_inv @ b
    return np.linalg.solve(built.V, b)


def _eigenhull_gamma(cfg: ExperimentConfig, ctx: _Context) -> float | None:
    if "gamma" in cfg.params:
        return float(cfg.params["gamma"])
    if ctx.beta is None or not ctx.beta > 0:
        return None
    return min(ctx.beta / 2, 0.25) / 2


def _measure(cfg: ExperimentConfig, ctx: _Context, H: np.ndarray, m: int, dim: int,
             b: np.ndarray, rec: TrialRecord) -> None:
    sc = cfg.scenario
    rb = numerical_range_bounds(H, cfg.sweep)
    W_H = rb.inner
    meas = rec.measured
    meas["sweep_err"] = rb.sweep_error
    tol = max(rb.sweep_error, ctx.W_A_err) + _ROUNDOFF * (1 + ctx.diam)
    if ctx.W_A is not None:
        meas["inclusion_err"] = one_sided_hausdorff(W_H, ctx.W_A)
        meas["inclusion_ok"] = bool(meas["inclusion_err"] <= 2 * tol)
        meas["dH_range"] = hausdorff(W_H, ctx.W_A)
    if sc == "fig1":
        meas["dH_ritz"] = hausdorff(convex_hull(np.linalg.eigvals(H)), ctx.eig_hull)
    if sc in ("fig3_radial", "fig3_circle"):
        meas["d_boundary"] = boundary_distance(W_H, ctx.W_A, tol=2 * tol / max(1.0, ctx.diam))
    if sc in ("fig4_nonnormal", "fig5_beta"):
        meas["dtH_hull"] = one_sided_hausdorff(ctx.eig_hull, W_H)
    if sc == "fig4_nonnormal":
        mt = (dim - 1) // 6
        if mt >= 1:
            rec.bounds["thm_nonnormal"] = theorem_bound(
                "thm_nonnormal", n=ctx.n, m=mt, alpha=cfg.alpha, kappa=ctx.kappa, diam=ctx.diam)
    if sc == "fig5_beta" and ctx.beta is not None and ctx.beta > 0 and ctx.kappa is not None:
        mt = (dim - 1) // 6
        g = _eigenhull_gamma(cfg, ctx)
        if mt >= 1 and g is not None:
            rec.bounds["thm_eigenhull"] = theorem_bound(
                "thm_eigenhull", n=ctx.n, m=mt, alpha=cfg.alpha, beta=ctx.beta, gamma=g,
                kappa=ctx.kappa, diam=ctx.diam)
    if sc == "bound_check":
        th = cfg.params["theorem"]
        if th in ("lemma_single_eig", "cor_errsmall"):
            lam_k = _built_for(cfg.matrix).eigenvalues[ctx.extreme]
            target = float(point_distance(W_H, lam_k))
        elif th == "thm_eigenhull":
            target = one_sided_hausdorff(ctx.eig_hull, W_H)
            meas["dtH_hull"] = target
        else:
            target = meas["dH_range"]
        if th == "thm_circle_upper":
            meas["interval_gap"] = float(interval_gaps(W_H, ctx.W_A, rb.angles).max())
        params = _bound_params(cfg, ctx, m, b)
        if th == "thm_eigenhull" and params["gamma"] is None:
            bound = math.inf
        else:
            bound = theorem_bound(th, **params)
        rec.bounds[th] = bound
        meas["target"] = target
        meas["within_bound"] = bool(target <= bound)


def _run_seed(cfg: ExperimentConfig, ctx: _Context, seed: int) -> list:
    built = _built_for(cfg.matrix)
    b = sample_sphere(ctx.n, make_rng(seed))
    t0 = time.perf_counter()
    top = max(ctx.dims.values())
    try:
        K = arnoldi(built.A, b, top)
    except (KrylovRangeError, np.linalg.LinAlgError, ArithmeticError) as exc:
        return [TrialRecord(seed, m, d, error=f"{type(exc).__name__}: {exc}")
                for m, d in ctx.dims.items()]
    base = time.perf_counter() - t0
    out = []
    for m, dim in ctx.dims.items():
        t1 = time.perf_counter()
        sub = K.leading(dim)
        rec = TrialRecord(seed, m, dim, breakdown=sub.breakdown)
        try:
            _measure(cfg, ctx, sub.H, m, dim, b, rec)
        except (KrylovRangeError, np.linalg.LinAlgError, ArithmeticError, ValueError) as exc:
            rec.error = f"{type(exc).__name__}: {exc}"
        rec.wall_time = time.perf_counter() - t1 + base / len(ctx.dims)
        out.append(rec)
    return out


def _run_trials(cfg: ExperimentConfig, jobs: int) -> ScenarioResult:
    built = _built_for(cfg.matrix)
    t0 = time.perf_counter()
    ctx = _prepare(cfg, built)
    prep = time.perf_counter() - t0
    seeds = sorted(set(cfg.seeds))
    if jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(seeds))) as ex:
            chunks = list(ex.map(_run_seed, [cfg] * len(seeds), [ctx] * len(seeds), seeds))
    else:
        chunks = [_run_seed(cfg, ctx, s) for s in seeds]
    records = sorted((r for c in chunks for r in c), key=lambda r: (r.seed, r.m))
    res = ScenarioResult(cfg, records)
    res.timings = {"prepare": prep, "total": time.perf_counter() - t0,
                   "per_seed": {str(s): sum(r.wall_time for r in c) for s, c in zip(seeds, chunks)}}
    res.rows = [{c: r.value(c) for c in COLUMNS[cfg.scenario]} for r in records]
    res.summary = _trial_summary(cfg, ctx, records)
    res.checks = _trial_checks(cfg, ctx, records, res.summary)
    res.figures = _trial_figures(cfg, ctx, built, records)
    return res


def _median_by_m(records, key, scale_pow: int = 0) -> tuple[np.ndarray, np.ndarray]:
    ms = sorted({r.m for r in records})
    xs, ys = [], []
    for m in ms:
        vals = [r.value(key) for r in records if r.m == m and r.error is None]
        vals = [v for v in vals if v is not None]
        if vals:
            dim = next(r.dim for r in records if r.m == m)
            xs.append(m)
            ys.append(float(np.median(vals)) * dim ** scale_pow)
    return np.array(xs, float), np.array(ys, float)


def _trial_summary(cfg, ctx, records) -> dict:
    s = {"n": ctx.n, "diam": ctx.diam, "kappa": ctx.kappa, "beta": ctx.beta,
         "W_A_sweep_err": ctx.W_A_err, "trials": len(records),
         "errors": sum(r.error is not None for r in records)}
    if cfg.scenario == "bound_check":
        th = cfg.params["theorem"]
        per_m = []
        for m in cfg.m_values:
            rs = [r for r in records if r.m == m]
            ok = [bool(r.measured.get("within_bound", False)) and r.error is None for r in rs]
            prob = _probability(cfg, ctx, th, m)
            per_m.append({"m": m, "dim": ctx.dims[m], "trials": len(rs),
                          "pass_rate": float(np.mean(ok)) if ok else 0.0,
                          "prob_bound": prob})
        s["per_m"] = per_m
    return _jsonable(s)


def _probability(cfg, ctx, th, m) -> float:
    p = {"n": ctx.n, "m": m, "alpha": cfg.alpha, "beta": ctx.beta,
         "gamma": _eigenhull_gamma(cfg, ctx) if th == "thm_eigenhull" else None}
    if th in ("cor_errsmall", "thm_eigenhull") and (p["beta"] is None or p["gamma"] is None
                                                    and th == "thm_eigenhull"):
        return -math.inf
    return theorem_probability(th, **p)


def _check(name: str, ok: bool, detail: str = "") -> dict:
    return {"name": name, "pass": bool(ok), "detail": detail}


def _trial_checks(cfg, ctx, records, summary) -> list:
    checks = []
    errs = [r for r in records if r.error is not None]
    checks.append(_check("no_trial_errors", not errs,
                         f"{len(errs)} failed trial(s)" + (f"; first: {errs[0].error}" if errs else "")))
    bad = [r for r in records for k, v in r.measured.items()
           if not isinstance(v, bool) and not (np.isfinite(v) and v >= 0)]
    checks.append(_check("measured_nonnegative_finite", not bad, f"{len(bad)} bad value(s)"))
    incl = [r for r in records if r.measured.get("inclusion_ok") is False]
    if ctx.W_A is not None:
        worst = max((r.measured.get("inclusion_err", 0.0) for r in records), default=0.0)
        checks.append(_check("inclusion_within_2_sweep_tol", not incl,
                             f"worst d~_H(W(H_m), W(A)) = {worst:.3e}"))
    if cfg.scenario == "bound_check":
        for row in summary["per_m"]:
            p = row["prob_bound"]
            p = -math.inf if p in (None, "-inf") else float(p)
            checks.append(_check(f"pass_rate_m{row['m']}", row["pass_rate"] >= p,
                                 f"pass rate {row['pass_rate']:.3f} vs probability bound {p:.4g}"))
    return checks


def _trial_figures(cfg, ctx, built, records) -> dict:
    sc = cfg.scenario
    figs = {}
    ts = bool(cfg.params.get("svg_timestamp", False))
    if sc == "fig1":
        figs["plot-fig1-ritz.svg"] = line_plot(
            {"median m dH(conv Ritz, conv eig)": _median_by_m(records, "m_dH_ritz")},
            "Ritz hull error times m", "m", "m * d_H", timestamp=ts)
        figs["plot-fig1-range.svg"] = line_plot(
            {"median m^2 dH(W(Hm), conv eig)": _median_by_m(records, "m2_dH_range")},
            "Range error times m^2", "m", "m^2 * d_H", timestamp=ts)
    elif sc in ("fig3_radial", "fig3_circle"):
        col = "m_d_boundary" if sc == "fig3_radial" else "m2_d_boundary"
        x, y = _median_by_m(records, col)
        series = {"median": (x, y)}
        for q, lab in ((0, "min"), (100, "max")):
            vals = [np.percentile([r.value(col) for r in records if r.m == m and r.error is None], q)
                    for m in x.astype(int)]
            series[lab] = (x, np.array(vals))
        figs[f"plot-{sc}.svg"] = line_plot(series, f"{col} over seeds", "m", col, timestamp=ts)
    elif sc == "fig4_nonnormal":
        figs["plot-fig4_nonnormal-distances.svg"] = line_plot(
            {"dH(W(A), W(Hm))": _median_by_m(records, "dH_range"),
             "d~H(conv eig, W(Hm))": _median_by_m(records, "dtH_hull")},
            "Non-normal example, medians over seeds", "m", "distance", logy=True, timestamp=ts)
        figs["plot-fig4_nonnormal-ranges.svg"] = _range_figure(cfg, ctx, built, ts)
    elif sc == "fig5_beta":
        figs["plot-fig5_beta-distance.svg"] = line_plot(
            {"d~H(conv eig, W(Hm))": _median_by_m(records, "dtH_hull")},
            "Eigenvalue hull error", "m", "distance", logy=True, timestamp=ts)
        figs["plot-fig5_beta-scaled.svg"] = line_plot(
            {"m d~H(conv eig, W(Hm))": _median_by_m(records, "m_dtH_hull")},
            "Eigenvalue hull error times m", "m", "m * distance", timestamp=ts)
    elif sc == "bound_check":
        th = cfg.params["theorem"]
        x, y = _median_by_m(records, "target")
        xb, yb = _median_by_m(records, "bound")
        figs["plot-bound_check.svg"] = line_plot(
            {"median measured": (x, y), f"{th} bound": (xb, yb)},
            f"{th}: measured vs bound", "m", "distance", logy=True, timestamp=ts)
    return figs


def _range_figure(cfg, ctx, built, ts) -> str:
    seed = min(cfg.seeds)
    dim = max(ctx.dims.values())
    K = arnoldi(built.A, sample_sphere(ctx.n, make_rng(seed)), dim)
    W_H = numerical_range_bounds(K.H, cfg.sweep).inner
    polys = {f"W(H_{K.effective_k}) seed {seed}": W_H.vertices}
    if ctx.W_A is not None:
        polys = {"W(A)": ctx.W_A.vertices, **polys}
    return polygon_plot(polys, {"eigenvalues": built.eigenvalues}, "Numerical ranges", timestamp=ts)


# ----------------------------------------------------------------------------
# certification scenarios


def default_poly_cases() -> list[dict]:
    """The full grid of extremal-polynomial certification cases."""
    cases = []
    for m in (2, 8, 32):
        for d in (0.05, 0.2, 0.5):
            for c1, c2 in ((-1.0, 1.0), (-1.0, 0.5), (0.0, 1.0)):
                cases.append({"family": "circle", "m": m, "delta": d, "c1": c1, "c2": c2})
    for m in (2, 8, 32):
        for e in (0.05, 0.2, 0.5):
            cases.append({"family": "disk", "m": m, "eps": e})
    for m in (2, 8, 16):
        for d in (0.05, 0.2, 0.5):
            cases.append({"family": "annulus", "m": m, "delta": d})
    return cases


def default_appendix_deltas() -> list[float]:
    return [round(0.05 * k, 2) for k in range(1, 20)]


def _run_poly(cfg: ExperimentConfig) -> ScenarioResult:
    t0 = time.perf_counter()
    cases = cfg.params.get("cases") or default_poly_cases()
    grid = int(cfg.params.get("grid_density", 1000))
    res = ScenarioResult(cfg)
    for case in cases:
        case = dict(case)
        spec = PolySpec(**case)
        rep = certify_remez(spec, grid_density=grid)
        d = rep.to_dict()
        res.rows.append({"family": spec.family, "params": json.dumps(spec.params(), sort_keys=True),
                         "value_at_point": rep.value_at_point, "max_on_region": rep.max_on_region,
                         "ratio": rep.ratio, "factor": rep.factor, "pass": rep.passed})
        res.checks.append(_check(f"remez {spec.family} {json.dumps(spec.params(), sort_keys=True)}",
                                 rep.passed, f"ratio {rep.ratio:.6g} vs factor {rep.factor:.6g}"))
        res.summary.setdefault("reports", []).append(_jsonable(d))
    deltas = cfg.params.get("appendix_deltas", default_appendix_deltas())
    adens = int(cfg.params.get("appendix_density", 10_000))
    for dl in deltas:
        ok = certify_appendix_map(float(dl), grid_density=adens)
        res.checks.append(_check(f"appendix_map delta={dl}", ok))
    res.timings = {"total": time.perf_counter() - t0}
    ts = bool(cfg.params.get("svg_timestamp", False))
    idx = np.arange(len(res.rows), dtype=float)
    res.figures["plot-poly_certify.svg"] = line_plot(
        {"ratio": (idx, [r["ratio"] for r in res.rows]),
         "required factor": (idx, [r["factor"] for r in res.rows])},
        "Remez certification", "case", "value", logy=True, timestamp=ts)
    return res


def _run_prob(cfg: ExperimentConfig) -> ScenarioResult:
    t0 = time.perf_counter()
    trials = int(cfg.params.get("trials", 100_000))
    cases = cfg.params.get("cases") or [{"name": k} for k in VERIFIERS]
    res = ScenarioResult(cfg)
    for case in cases:
        name = case["name"]
        rep = verify_prob(name, case.get("params"), trials=int(case.get("trials", trials)),
                          rng=int(min(cfg.seeds)))
        res.rows.append({"name": name, "kind": rep.kind, "trials": rep.trials,
                         "empirical": rep.empirical, "bound": rep.bound, "se": rep.se,
                         "pass": rep.passed})
        res.checks.append(_check(f"verify_prob {name}", rep.passed,
                                 f"empirical {rep.empirical:.6g} vs bound {rep.bound:.6g}"))
        res.summary.setdefault("reports", []).append(_jsonable(rep.to_dict()))
    res.timings = {"total": time.perf_counter() - t0}
    ts = bool(cfg.params.get("svg_timestamp", False))
    idx = np.arange(len(res.rows), dtype=float)
    res.figures["plot-prob_verify.svg"] = line_plot(
        {"empirical": (idx, [r["empirical"] for r in res.rows]),
         "bound": (idx, [r["bound"] for r in res.rows])},
        "Probabilistic lemmas", "verifier", "value", timestamp=ts)
    return res


# ----------------------------------------------------------------------------
# entry points


def run_scenario(cfg: ExperimentConfig, jobs: int = 1, write: bool = True) -> ScenarioResult:
    """Run a scenario and (by default) write its result files to ``cfg.output_dir``.

    Per-trial numerical failures are recorded in the ``error`` column and
    reported by the ``no_trial_errors`` check instead of aborting the run.
    """
    if cfg.scenario == "poly_certify":
        res = _run_poly(cfg)
    elif cfg.scenario == "prob_verify":
        res = _run_prob(cfg)
    else:
        res = _run_trials(cfg, max(1, int(jobs)))
    if write:
        write_outputs(res, cfg.output_dir)
    return res


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_csv_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_outputs(res: ScenarioResult, out_dir) -> list[Path]:
    """Write results.csv, results.json, plot-*.svg and timings.json; return the paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    sc = res.config.scenario
    paths = []
    p = out / "results.csv"
    _write(p, _csv_text(COLUMNS[sc], res.rows))
    paths.append(p)
    # the output directory is left out so results do not depend on where they are written
    conf = {k: v for k, v in res.config.to_dict().items() if k != "output_dir"}
    doc = {"config": conf, "columns": COLUMNS[sc],
           "rows": [{k: _jsonable(v) for k, v in r.items()} for r in res.rows],
           "records": [r.to_dict() for r in res.records], "summary": res.summary,
           "checks": res.checks, "passed": res.passed}
    p = out / "results.json"
    _write(p, json.dumps(_jsonable(doc), indent=1, sort_keys=False) + "\n")
    paths.append(p)
    if sc == "bound_check":
        p = out / "summary.csv"
        cols = ["m", "dim", "trials", "pass_rate", "prob_bound"]
        _write(p, _csv_text(cols, res.summary["per_m"]))
        paths.append(p)
    for name, svg in sorted(res.figures.items()):
        p = out / name
        _write(p, svg)
        paths.append(p)
    p = out / "timings.json"
    _write(p, json.dumps(_jsonable(res.timings), indent=1, sort_keys=True) + "\n")
    paths.append(p)
    return paths


def range_report(spec: MatrixSpec, m: int, seed: int = 0, n_angles: int = 1024) -> dict:
    """``W(H_m)`` for one seed, with its distances to ``W(A)`` and the eigenvalue hull."""
    built = build_matrix(spec)
    b = sample_sphere(built.n, make_rng(seed))
    K = arnoldi(built.A, b, m)
    cfg = SweepConfig(n_angles)
    rb = numerical_range_bounds(K.H, cfg)
    hull = convex_hull(built.eigenvalues)
    rep = {"matrix": spec.to_dict(), "m": m, "seed": seed, "effective_k": K.effective_k,
           "breakdown": K.breakdown, "n_angles": n_angles, "sweep_err": rb.sweep_error,
           "W_Hm": rb.inner.to_json(),
           "dtH_hull": one_sided_hausdorff(hull, rb.inner)}
    if built.normal:
        W_A, err = hull, 0.0
    elif not _is_operator(built.A):
        ra = numerical_range_bounds(built.A, cfg)
        W_A, err = ra.inner, ra.sweep_error
    else:
        W_A = None
    if W_A is not None:
        rep["W_A"] = W_A.to_json()
        rep["W_A_sweep_err"] = err
        rep["dH_range"] = hausdorff(rb.inner, W_A)
        rep["inclusion_err"] = one_sided_hausdorff(rb.inner, W_A)
    return _jsonable(rep)


def _is_operator(A) -> bool:
    return not (isinstance(A, np.ndarray) or hasattr(A, "tocsr"))
