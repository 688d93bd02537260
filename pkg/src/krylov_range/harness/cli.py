"""Command line entry point ``krylov-range``.

Subcommands::

    run <config> [--seeds 0-49] [--jobs N] [--sweep-angles K] [--out DIR]
    certify-poly [--family F --m M ...] [--appendix]
    verify-prob [NAME ...] [--trials T] [--seed S] [--params JSON]
    bound NAME --params k=v [k=v ...]
    range <matrix-spec> -m M [--seed S] [--sweep-angles K] [--out FILE]

The exit code is 0 iff every asserted check passes, 1 if a check fails and
2 for usage, configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from ..ensembles import MatrixSpec, verify_prob
from ..errors import KrylovRangeError
from ..extremal_polys import PolySpec, certify_appendix_map, certify_remez
from ..probability import VERIFIERS
from .bounds import THEOREMS, theorem_bound, theorem_probability
from .config import load_config, parse_seeds
from .scenarios import default_appendix_deltas, default_poly_cases, range_report, run_scenario

__all__ = ["main", "build_parser", "parse_matrix_spec"]


def _kv(items) -> dict:
    out = {}
    for item in items or []:
        for tok in item.split(","):
            if not tok.strip():
                continue
            if "=" not in tok:
                raise KrylovRangeError(f"expected key=value, got {tok!r}")
            k, v = tok.split("=", 1)
            out[k.strip()] = _num(v.strip())
    return out


def _num(v: str):
    for conv in (int, float):
        try:
            return conv(v)
        except ValueError:
            pass
    return v


def parse_matrix_spec(text: str) -> MatrixSpec:
    """Parse a matrix spec given as a JSON file, a JSON object or ``kind:key=value,...``."""
    p = Path(text)
    if p.suffix == ".json" and p.is_file():
        return MatrixSpec.from_dict(json.loads(p.read_text(encoding="utf-8")))
    if text.lstrip().startswith("{"):
        return MatrixSpec.from_dict(json.loads(text))
    kind, _, rest = text.partition(":")
    return MatrixSpec.from_dict({"kind": kind, **_kv([rest])})


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="krylov-range",
                                 description="Krylov estimates of the numerical range: experiments and checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config (JSON or TOML)")
    r.add_argument("config")
    r.add_argument("--seeds", help='override seeds, e.g. "0-49" or "0,1,2"')
    r.add_argument("--jobs", type=int, default=1, help="worker processes (trial level)")
    r.add_argument("--sweep-angles", type=int, help="angles in the numerical range sweep")
    r.add_argument("--out", help="output directory")
    r.add_argument("--svg-timestamp", action="store_true", help="stamp SVG files with the run time")

    c = sub.add_parser("certify-poly", help="certify the extremal polynomial inequalities")
    c.add_argument("--family", choices=("circle", "disk", "annulus"))
    c.add_argument("--m", type=int)
    c.add_argument("--delta", type=float, default=0.0)
    c.add_argument("--eps", type=float, default=0.1)
    c.add_argument("--c1", type=float, default=-1.0)
    c.add_argument("--c2", type=float, default=1.0)
    c.add_argument("--grid-density", type=int, default=1000)
    c.add_argument("--appendix", type=float, nargs="*", metavar="DELTA",
                   help="check the appendix map (all default deltas if none given)")
    c.add_argument("--appendix-density", type=int, default=10_000)

    v = sub.add_parser("verify-prob", help="Monte Carlo checks of the probabilistic lemmas")
    v.add_argument("names", nargs="*", help=f"verifiers (default all): {', '.join(VERIFIERS)}")
    v.add_argument("--trials", type=int, default=100_000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--params", help="JSON object of verifier parameters")

    b = sub.add_parser("bound", help="evaluate a theorem bound")
    b.add_argument("name", choices=THEOREMS)
    b.add_argument("--params", nargs="*", default=[], help="key=value pairs (n, m, alpha, ...)")

    g = sub.add_parser("range", help="numerical range of H_m for one matrix and seed")
    g.add_argument("matrix", help='JSON file, JSON object or "kind:key=value,..."')
    g.add_argument("-m", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--sweep-angles", type=int, default=1024)
    g.add_argument("--out", help="write the JSON report here instead of stdout")
    return ap


def _print_checks(checks) -> bool:
    ok = True
    for c in checks:
        ok &= bool(c["pass"])
        detail = f"  ({c['detail']})" if c.get("detail") else ""
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']}{detail}")
    return ok


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    seeds = parse_seeds(args.seeds) if args.seeds else None
    cfg = cfg.with_overrides(seeds=seeds, n_angles=args.sweep_angles, output_dir=args.out)
    if args.svg_timestamp:
        cfg.params["svg_timestamp"] = True
    res = run_scenario(cfg, jobs=args.jobs)
    print(f"scenario {cfg.scenario}: {len(res.rows)} rows written to {cfg.output_dir}")
    return 0 if _print_checks(res.checks) else 1


def _cmd_certify(args) -> int:
    checks = []
    if args.family:
        if args.m is None:
            raise KrylovRangeError("--m is required with --family")
        cases = [{"family": args.family, "m": args.m, "delta": args.delta, "eps": args.eps,
                  "c1": args.c1, "c2": args.c2}]
    elif args.appendix is None:
        cases = default_poly_cases()
    else:
        cases = []
    for case in cases:
        rep = certify_remez(PolySpec(**case), grid_density=args.grid_density)
        print(json.dumps(rep.to_dict(), sort_keys=True))
        checks.append({"name": f"remez {rep.family}", "pass": rep.passed})
    if args.appendix is not None or not args.family:
        deltas = args.appendix or default_appendix_deltas()
        for d in deltas:
            ok = certify_appendix_map(d, grid_density=args.appendix_density)
            print(json.dumps({"appendix_map": {"delta": d, "pass": ok}}))
            checks.append({"name": f"appendix {d}", "pass": ok})
    failed = sum(not c["pass"] for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} certifications passed")
    return 0 if failed == 0 else 1


def _cmd_verify(args) -> int:
    names = args.names or list(VERIFIERS)
    params = json.loads(args.params) if args.params else None
    failed = 0
    for name in names:
        rep = verify_prob(name, params, trials=args.trials, rng=args.seed)
        print(json.dumps(rep.to_dict(), sort_keys=True, default=str))
        failed += not rep.passed
    print(f"{len(names) - failed}/{len(names)} verifiers passed")
    return 0 if failed == 0 else 1


def _cmd_bound(args) -> int:
    p = _kv(args.params)
    val = theorem_bound(args.name, **p)
    out = {"name": args.name, "params": p, "bound": val if math.isfinite(val) else str(val)}
    try:
        out["probability"] = theorem_probability(args.name, **p)
    except KrylovRangeError:
        pass
    print(json.dumps(out, sort_keys=True))
    return 0


def _cmd_range(args) -> int:
    spec = parse_matrix_spec(args.matrix)
    rep = range_report(spec, args.m, seed=args.seed, n_angles=args.sweep_angles)
    text = json.dumps(rep, indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


_COMMANDS = {"run": _cmd_run, "certify-poly": _cmd_certify, "verify-prob": _cmd_verify,
             "bound": _cmd_bound, "range": _cmd_range}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (KrylovRangeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
