"""Command line front end.

    qpo build            construct sigma and A* for the step counterexample
    qpo counterexample   tabulate the step counterexample A(t)
    qpo verify           construct and run the property checks
    qpo disc             disc experiments (linden, thm2, prop2)
    qpo strip            strip experiments (warschawski, prop3, thm3)
    qpo run CONFIG       run an experiment from a JSON config

Flags override config fields; QPO_OUT overrides the output directory.
Exit codes: 0 pass, 2 check failure, 3 configuration error, 4 runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .errors import ConfigurationError, QPOError

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3, 4


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _add_params(p):
    g = p.add_argument_group("parameters (override config fields)")
    g.add_argument("--config", help="JSON config to start from")
    g.add_argument("--lam", type=float)
    g.add_argument("--rho", type=float)
    g.add_argument("--eta", type=float)
    g.add_argument("--eps", type=float)
    g.add_argument("--eps1", type=float)
    g.add_argument("--p-list", type=_floats, dest="p_list")
    g.add_argument("--eta-list", type=_floats, dest="eta_list")
    g.add_argument("--per-decade", type=int, dest="per_decade")
    g.add_argument("--T-max", type=float, dest="T_max")
    g.add_argument("--r-max", type=float, dest="r_max")
    g.add_argument("--ramp-fraction", type=float, dest="ramp_fraction")
    g.add_argument("--q", type=float)
    g.add_argument("--l-mid", type=float, dest="l_mid")
    g.add_argument("--l-amp", type=float, dest="l_amp")
    g.add_argument("--a", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", dest="out_dir", help="output directory")
    g.add_argument("--quiet", action="store_true")


PARAM_KEYS = ("lam", "rho", "eta", "eps", "eps1", "p_list", "eta_list", "per_decade",
              "T_max", "r_max", "ramp_fraction", "q", "l_mid", "l_amp", "a", "seed",
              "out_dir")


def build_parser():
    ap = argparse.ArgumentParser(prog="qpo", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct sigma and A*, write CSVs")
    _add_params(p)
    p = sub.add_parser("verify", help="construct and check sigma and A*")
    _add_params(p)
    p = sub.add_parser("counterexample", help="tabulate the step counterexample")
    _add_params(p)
    p = sub.add_parser("disc", help="disc experiments")
    p.add_argument("--experiment", choices=("linden", "thm2", "prop2"), default="linden")
    _add_params(p)
    p = sub.add_parser("strip", help="strip experiments")
    p.add_argument("--experiment", choices=("warschawski", "prop3", "thm3"),
                   default="warschawski")
    _add_params(p)
    p = sub.add_parser("run", help="run an experiment from a JSON config")
    p.add_argument("config_path", metavar="CONFIG")
    p.add_argument("--experiment", help="override the experiment id")
    _add_params(p)
    return ap


def _overrides(args):
    return {k: getattr(args, k) for k in PARAM_KEYS if getattr(args, k, None) is not None}


def _load(args, experiment):
    from .harness import config_from_dict, parse_config

    ov = _overrides(args)
    if getattr(args, "experiment", None):
        ov["experiment"] = args.experiment
    if isinstance(ov.get("seed"), float):
        ov["seed"] = int(ov["seed"])
    path = getattr(args, "config_path", None) or args.config
    if path:
        return parse_config(path, ov)
    return config_from_dict({"experiment": experiment}, ov)


def _counterexample(args):
    import numpy as np
    from .growth import GridSpec, build_counterexample
    from .harness import export_csv

    cfg = _load(args, "thm1")
    A = build_counterexample(cfg.lam, cfg.rho, cfg.ramp_fraction, T_max=cfg.T_max)
    grid = GridSpec.log_uniform(max(A.domain_start, math.e), cfg.T_max, cfg.per_decade)
    t = np.asarray(grid.points)
    la = A.log_value(t)
    out = Path(os.environ.get("QPO_OUT") or cfg.out_dir)
    rows = list(zip(t, np.exp(la), la / np.log(t)))
    export_csv(rows, out / "counterexample.csv", ("t", "A", "d"))
    (out / "counterexample.json").write_text(A.to_json() + "\n", encoding="utf-8")
    if not args.quiet:
        print(f"wrote {out / 'counterexample.csv'} ({len(rows)} rows)")
    return EXIT_OK


def _run(args, experiment, gate=True):
    from .harness import run_experiment

    cfg = _load(args, experiment)
    man = run_experiment(cfg)
    if not args.quiet:
        for name, rep in man.report_objects.items():
            print(f"[{name}]")
            print(rep)
        print(f"status: {man.status}")
    if gate and not man.passed:
        return EXIT_CHECK
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "counterexample":
            return _counterexample(args)
        if args.command == "build":
            return _run(args, "thm1", gate=False)
        if args.command == "verify":
            return _run(args, "thm1")
        if args.command == "disc":
            return _run(args, args.experiment)
        if args.command == "strip":
            return _run(args, args.experiment)
        return _run(args, None)
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (QPOError, ArithmeticError, ValueError, OSError) as e:
        print(f"runtime error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
