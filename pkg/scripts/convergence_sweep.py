#!/usr/bin/env python3
"""Continuum-limit sweep: evolve the same Gaussian packet through the walk
and through the Dirac reference solver on the uniform SU(2) electric field,
one leg per lattice step, and fit the log-log slope of the mean relative
difference.  The full-size run takes a few minutes; pass --quick for a
desk-check at a third of the domain."""

import argparse
import json

from gaugewalk.experiments import ExperimentConfig, run_convergence


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--e-ym", type=float, default=0.08)
    ap.add_argument("--mass", type=float, default=0.1)
    ap.add_argument("--sigma", type=float, default=0.5)
    ap.add_argument("--k0", type=float, default=0.0)
    ap.add_argument("--epsilon", type=float, action="append", dest="epsilons")
    ap.add_argument("--out", default="out/convergence")
    ap.add_argument("--quick", action="store_true",
                    help="smaller domain and horizon (~15s instead of ~3min)")
    args = ap.parse_args()

    x_max, t_max = (30.0, 10.0) if args.quick else (100.0, 50.0)
    cfg = ExperimentConfig(
        experiment="convergence", dim=2, mass=args.mass, e_ym=args.e_ym,
        sigma=args.sigma, k0=args.k0,
        epsilons=tuple(args.epsilons or (0.4, 0.2, 0.1, 0.05)),
        x_max=x_max, t_max=t_max, output_dir=args.out)
    res = run_convergence(cfg)
    print(json.dumps({k: res[k] for k in
                      ("slope_re", "slope_im", "r2_re", "r2_im")}, indent=2))
    print(f"artifacts written to {args.out}/")


if __name__ == "__main__":
    main()
