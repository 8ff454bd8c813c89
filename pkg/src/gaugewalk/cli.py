"""Command line entry point.

Exit codes: 0 success, 1 config error, 2 invariant violation, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import sys

from .dirac import NumericalAbort
from .experiments import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    InvariantViolation,
    run_convergence,
    run_curvature_check,
    run_evolve,
    run_gauge_check,
    run_trajectory,
)

_RUNNERS = {
    "evolve": run_evolve,
    "convergence": run_convergence,
    "trajectory": run_trajectory,
    "gauge-check": run_gauge_check,
    "curvature-check": run_curvature_check,
}


def _add_overrides(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; flags override its fields")
    sub.add_argument("--epsilon", type=float, action="append", dest="epsilons",
                     help="lattice step; repeat for a sweep")
    sub.add_argument("--e-ym", type=float, dest="e_ym", help="SU(2) electric field strength")
    sub.add_argument("--mass", type=float, help="fermion mass")
    sub.add_argument("--sigma", type=float, help="packet width in wavenumber")
    sub.add_argument("--k0", type=float, help="packet center wavenumber")
    sub.add_argument("--g", type=float, help="classical coupling constant")
    sub.add_argument("--theta", type=float, help="raw coin angle override")
    sub.add_argument("--dim", type=int, help="internal dimension N")
    sub.add_argument("--x-max", type=float, dest="x_max", help="domain half-width")
    sub.add_argument("--t-max", type=float, dest="t_max", help="final physical time")
    sub.add_argument("--seed", type=int, help="seed for randomized checks")
    sub.add_argument("--out", dest="output_dir", help="output directory")


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    base = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            base = json.load(fh)
    base["experiment"] = args.experiment
    for name in ("epsilons", "e_ym", "mass", "sigma", "k0", "g", "theta", "dim",
                 "x_max", "t_max", "seed", "output_dir"):
        value = getattr(args, name, None)
        if value is not None:
            base[name] = value
    try:
        return ExperimentConfig(**base)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaugewalk", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        _add_overrides(subs.add_parser(name))
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        result = _RUNNERS[cfg.experiment](cfg)
    except (ConfigError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except NumericalAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3
    summary = {k: v for k, v in result.items() if not isinstance(v, (list, dict))}
    print(json.dumps({"experiment": cfg.experiment, "output_dir": cfg.output_dir, **summary}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
