#!/usr/bin/env python3
"""Convergence tables: step halving for finite-difference checks, sample
doubling for quadrature checks.

    python3 scripts/run_convergence.py --checks C6 C9 C4 C3 --trials 4
"""
import argparse
import json

from loopforms.suite import FD_CLASSES, RunConfig, convergence_study, lookup, observed_ratios


def grid_for(name, cfg):
    if lookup(name)[1].tolerance_class in FD_CLASSES:
        return [(cfg.N, h) for h in (2e-2, 1e-2, 5e-3, 2.5e-3, 1.25e-3)]
    return [(N, cfg.h) for N in (32, 64, 128, 256, 512)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--checks", nargs="+", default=["C6", "C9", "C12", "C4", "C3"])
    ap.add_argument("--trials", type=int, default=4)
    ap.add_argument("--modes", type=int, default=8)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    cfg = RunConfig(modes=args.modes)
    tables = {}
    for name in args.checks:
        rows = convergence_study(name, grid_for(name, cfg), cfg, trials=args.trials)
        tables[name] = {"rows": rows, "ratios": observed_ratios(rows)}
    if args.json:
        print(json.dumps(tables, indent=2))
        return
    for name, t in tables.items():
        print(f"\n{name}")
        print(f"{'N':>6} {'h':>10} {'max rel residual':>18}")
        for r in t["rows"]:
            print(f"{r['N']:>6} {r['h']:>10.3g} {r['max_rel_residual']:>18.3e}")
        print("ratios", " ".join("-" if q is None else f"{q:.3f}" for q in t["ratios"]))


if __name__ == "__main__":
    main()
