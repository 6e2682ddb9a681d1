#!/usr/bin/env python3
"""Sweep the transport parameter x: thin families versus the rotation
counterexample.

Only at x = 1 does the integrand vanish on both thin families; the
counterexample integral follows (1 - x)/2 * Y with Y from the fixture.

    python3 scripts/dichotomy.py --xs 0 0.5 1 2
"""
import argparse

import numpy as np

from loopforms import geometry as geo
from loopforms.lie import exp_map, random_algebra
from loopforms.loops import BundlePairLoop, random_loop
from loopforms.suite import counterexample_fixture, fixture_loop


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--xs", type=float, nargs="+", default=[0.0, 0.25, 0.5, 1.0, 1.5, 2.0])
    ap.add_argument("--samples", type=int, default=256)
    ap.add_argument("--steps", type=int, default=256)
    ap.add_argument("--connection", default="scaled:0.7")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    tc = geo.TrivialConnection(args.connection)
    pair = BundlePairLoop(*(random_loop(args.seed + i, N=args.samples) for i in range(3)))
    rot = geo.pt_rotation_family(pair, args.steps)
    warp = geo.pt_reparam_family(pair, S=args.steps)
    m0, g0 = exp_map(random_algebra(np.random.default_rng(args.seed), 2, 2))
    counter = geo.pt_counterexample(fixture_loop(args.samples), m0, g0, args.steps)
    Y = counterexample_fixture()["Y"]

    print(f"{'x':>6} {'max|rot|':>10} {'max|warp|':>10} {'counter':>14} {'(1-x)Y/2':>14}")
    for x in args.xs:
        cfg = geo.PTConfig(x)
        r = np.max(np.abs(geo.pt_integrand_rows(tc, cfg, rot)))
        w = np.max(np.abs(geo.pt_integrand_rows(tc, cfg, warp)))
        c = geo.pt_integral(tc, cfg, counter)
        print(f"{x:>6.2f} {r:>10.2e} {w:>10.2e} {c:>14.8f} {(1 - x) * Y / 2:>14.8f}")


if __name__ == "__main__":
    main()
