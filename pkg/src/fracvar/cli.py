"""``fracvar`` command line: fbm, simulate, estimate, study, clt.

Exit codes: 0 success, 1 domain/data error, 2 usage error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path as FsPath

from fracvar.errors import FracvarError
from fracvar.estimators import ESTIMATOR_KINDS, INCREMENT, estimate
from fracvar.fbm import FbmSpec, sample_fbm
from fracvar.filters import Filter
from fracvar.harness import DEFAULT_REPS, StudySetting, builtin_settings, clt_study, run_setting
from fracvar.path import Path
from fracvar.rng import SEED_ENV, default_seed
from fracvar.sde import DriftSpec, SdeSpec, simulate_euler

log = logging.getLogger("fracvar")


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        FsPath(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(args, out: str | None) -> str:
    if args.format:
        return args.format
    return "json" if out and out.endswith(".json") else "csv"


def _seed(args) -> int:
    return default_seed() if args.seed is None else args.seed


def cmd_fbm(args) -> int:
    spec = FbmSpec(args.h, args.n, args.delta, _seed(args))
    path = sample_fbm(spec)
    _emit(path.to_json() if _fmt(args, args.out) == "json" else path.to_csv(), args.out)
    return 0


def cmd_simulate(args) -> int:
    spec = SdeSpec(args.x0, DriftSpec.parse(args.drift, args.allow_unbounded_drift), args.sigma, args.horizon, args.h)
    path = simulate_euler(spec, args.n, args.oversample, _seed(args))
    _emit(path.to_json() if _fmt(args, args.out) == "json" else path.to_csv(), args.out)
    return 0


def cmd_estimate(args) -> int:
    path = Path.read(args.input)
    base = Filter.parse(args.filter) if args.filter else INCREMENT
    delta = None
    if args.delta is not None:
        if args.estimator == "regression_h1":
            log.warning("--delta %g overrides the file mesh %g", args.delta, path.delta)
            delta = args.delta
        else:
            log.warning("--delta is ignored by the %s estimator", args.estimator)
    result = estimate(path, args.estimator, base, delta)
    for w in result.warnings:
        log.warning(w)
    _emit(json.dumps(result.to_dict(), indent=1) + "\n", args.out)
    return 0


def _load_setting(ref: str) -> StudySetting:
    labels = {s.label: s for s in builtin_settings()}
    if ref in labels:
        return labels[ref]
    p = FsPath(ref)
    if p.suffix == ".json" and p.exists():
        return StudySetting.from_json(p.read_text())
    raise UsageError(f"unknown setting {ref!r}; builtin labels: {', '.join(labels)} (or a JSON file)")


def cmd_study(args) -> int:
    setting = _load_setting(args.setting)
    changes = {}
    if args.reps is not None:
        changes["reps"] = args.reps
    if args.seed is not None:
        changes["seed"] = args.seed
    elif os.environ.get(SEED_ENV) is not None:
        changes["seed"] = default_seed()
    if args.n_list:
        changes["n_list"] = tuple(int(x) for x in args.n_list.split(","))
    setting = dataclasses.replace(setting, **changes)
    report = run_setting(setting, args.parallelism)
    print(report.table())
    if args.out:
        text = report.to_json(args.dump_reps is not None) if _fmt(args, args.out) == "json" else report.to_csv()
        FsPath(args.out).write_text(text)
    if args.dump_reps:
        FsPath(args.dump_reps).write_text(report.reps_csv())
    return 0


def cmd_clt(args) -> int:
    rep = clt_study(Filter.parse(args.filter), args.h, args.alpha, args.n, args.reps, _seed(args))
    _emit(json.dumps(rep.to_dict(), indent=1) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="base seed (default: $FRACVAR_SEED, else 0)")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)

    ap = argparse.ArgumentParser(prog="fracvar", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fbm", parents=[common], help="sample a fractional Brownian motion path")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--n", type=int, required=True, help="number of grid points")
    p.add_argument("--delta", type=float, default=1.0)
    p.set_defaults(func=cmd_fbm)

    p = sub.add_parser("simulate", parents=[common], help="simulate the additive-noise SDE")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--n", type=int, required=True, help="number of observation steps")
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--drift", default="sine",
                   help="zero | sine | constant:C | scaled-tanh:THETA | linear:THETA (unbounded)")
    p.add_argument("--allow-unbounded-drift", action="store_true",
                   help="permit drifts without a finite bound, e.g. linear mean reversion")
    p.add_argument("--oversample", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", parents=[common], help="estimate H from a path file")
    p.add_argument("--input", required=True)
    p.add_argument("--estimator", choices=ESTIMATOR_KINDS, default="ratio")
    p.add_argument("--filter", default=None, help='base filter, e.g. "1,-2,1"')
    p.add_argument("--delta", type=float, default=None, help="mesh override for regression_h1")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("study", parents=[common], help="run a Monte Carlo MSE study")
    p.add_argument("--setting", required=True, help="builtin label (Study-S1..S7) or JSON file")
    p.add_argument("--reps", type=int, default=None, help=f"replications (default {DEFAULT_REPS})")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--n-list", default=None, help="comma separated sample sizes override")
    p.add_argument("--dump-reps", default=None, metavar="FILE",
                   help="write per-replication estimates as CSV to FILE")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("clt", parents=[common], help="moment check of sqrt(n) V over fBm paths")
    p.add_argument("--filter", default="-1,1")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--reps", type=int, default=2000)
    p.set_defaults(func=cmd_clt)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"fracvar: error: {exc}", file=sys.stderr)
        return 2
    except (FracvarError, OSError) as exc:
        print(f"fracvar: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
