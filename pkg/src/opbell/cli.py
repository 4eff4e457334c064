"""``opbell`` command line interface.

Exit codes: 0 all checks hold, 1 at least one failure (Violated or
Incomparable), 2 configuration error, 3 every trial had unmet hypotheses.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import constants
from .checks import CHECK_IDS, VARIANTS, Verdict, reproduce_counterexample, run_record
from .errors import OpBellError
from .functions import IntervalBounds, parse_function
from .harness import SWEEP_COLUMNS, CampaignConfig, parse_grid, run_campaign, sweep, sweep_csv

EXIT_OK, EXIT_VIOLATED, EXIT_CONFIG, EXIT_UNMET = 0, 1, 2, 3


def _dump(payload, out: Path | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=False, default=str)
    if out is not None:
        out.write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _maps_arg(value: str) -> tuple:
    return tuple(x.strip() for x in value.split(",") if x.strip())


def cmd_verify(args) -> int:
    cfg = CampaignConfig(
        check_id=args.check, trials=args.trials, n=args.n, m=args.m, M=args.M, r=args.r,
        v=args.v, maps=args.map, f=args.f, seed=args.seed, tol=args.tol, variant=args.variant,
    )
    rep = run_campaign(cfg, workers=args.workers)
    payload = rep.to_dict()
    if args.out:
        _dump(payload, args.out)
        summary = {k: payload[k] for k in ("counts", "worst_gap", "median_gap", "runtime")}
        print(json.dumps(summary, sort_keys=True))
    else:
        _dump(payload, None)
    if rep.failures:
        return EXIT_VIOLATED
    if rep.counts[Verdict.HYPOTHESIS_UNMET.value] == rep.config.trials:
        return EXIT_UNMET
    return EXIT_OK


def cmd_constant(args) -> int:
    f = parse_function(args.f)
    b = IntervalBounds(args.m, args.M)
    if args.kind == "K":
        res = constants.kantorovich(f, b, method=args.method, sense=args.sense)
    elif args.kind == "beta":
        res = constants.beta(f, b)
    else:
        res = constants.beta_tilde(f, b)
    print(json.dumps({"value": res.value, "argmax_t": res.argmax_t, "method": res.method.value}))
    return EXIT_OK


def cmd_counterexample(args) -> int:
    rep = reproduce_counterexample(args.tol)
    _dump(rep.to_dict(), args.out)
    ok = rep.notes["lhs_max_abs_error"] <= 1e-12 and rep.notes["rhs_max_abs_error"] <= 1e-12
    return EXIT_OK if ok and rep.verdict is Verdict.INCOMPARABLE else EXIT_VIOLATED


def cmd_sweep(args) -> int:
    r_values = parse_grid(args.r)
    ms = parse_grid(args.m)
    Ms = parse_grid(args.M)
    if len(ms) != len(Ms):
        raise OpBellError("--m and --M must list the same number of values")
    rows = sweep(r_values, list(zip(ms, Ms)), trials=args.trials, n=args.n, seed=args.seed,
                 tol=args.tol, workers=args.workers)
    text = sweep_csv(rows)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_replay(args) -> int:
    report = json.loads(args.source.read_text(encoding="utf-8"))
    cfg = report["config"]
    rows = [v for v in report.get("violations", []) if v["index"] == args.index]
    if rows:
        record = rows[0]["instance"]
    elif report.get("worst_index") == args.index:
        record = report["worst_instance"]
    else:
        raise OpBellError(f"trial {args.index} is not stored in {args.source}")
    rep = run_record(cfg["check_id"], record, cfg["tol"])
    _dump(rep.to_dict(), None)
    if rep.verdict.failed:
        return EXIT_VIOLATED
    return EXIT_UNMET if rep.verdict is Verdict.HYPOTHESIS_UNMET else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opbell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a randomized campaign for one check")
    p.add_argument("--check", required=True, choices=CHECK_IDS)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=float, default=None, help="lower spectral bound (check default)")
    p.add_argument("--M", type=float, default=None, help="upper spectral bound (check default)")
    p.add_argument("--r", default=None,
                   help="'3', '2.5,3,4' (list), '0:1' (range) or '-1:0|1:2' (union)")
    p.add_argument("--v", default="uniform", help="'uniform' or a fixed weight in [0, 1]")
    p.add_argument("--map", type=_maps_arg, default=("all",),
                   help="'all' or comma list of identity,trace,pinching,vector-state,isometry,mixture")
    p.add_argument("--f", default=None, help="function spec, e.g. 'power:p=0.5', 'exp'")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--variant", default="map-first", choices=VARIANTS)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("constant", help="compute K, beta or beta~ for f on [m, M]")
    p.add_argument("--f", required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--kind", default="K", choices=("K", "beta", "beta-tilde"))
    p.add_argument("--method", default=None, choices=("closed", "grid"))
    p.add_argument("--sense", default=None, choices=("max", "min"))
    p.set_defaults(func=cmd_constant)

    p = sub.add_parser("counterexample", help="reproduce the fixed 2x2 counterexample")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser(
        "sweep", help="K, argmax and worst thm-power gap over a grid",
        description="CSV columns: " + ",".join(SWEEP_COLUMNS)
        + ". Floats use 17 significant digits.",
    )
    p.add_argument("--r", required=True, help="'start:stop:step' or comma list")
    p.add_argument("--m", required=True, help="value or comma list (paired with --M)")
    p.add_argument("--M", required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("replay", help="re-run one stored trial of a verify report")
    p.add_argument("--from", dest="source", type=Path, required=True)
    p.add_argument("--index", type=int, required=True)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (OpBellError, ValueError, KeyError, OSError) as exc:
        print(f"opbell: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
