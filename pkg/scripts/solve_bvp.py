#!/usr/bin/env python3
"""Solve the radial quasilinear problem by amplitude shooting and export it.

Usage: python scripts/solve_bvp.py [--tau T] [--beta B] [--bracket LO HI]
                                   [--out solution.csv]
"""

import argparse

from hslog.functionals import LogParams
from hslog.params import validate_params
from hslog.radial import make_grid, pointwise_bound_check, profile_to_csv
from hslog.shooting import shoot


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tau", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--bracket", nargs=2, type=float, default=[20.0, 50.0])
    ap.add_argument("--grid-m", type=int, default=2000)
    ap.add_argument("--out", default="solution.csv")
    args = ap.parse_args()

    ps = validate_params(2, 2, 2, 2)
    grid = make_grid(args.grid_m, 3.0)
    res = shoot(LogParams(args.tau, args.beta), ps, tuple(args.bracket), grid)
    bound = pointwise_bound_check(res.profile, ps)

    print(f"amplitude          = {res.amplitude:.10g}")
    print(f"boundary residual  = {res.boundary_residual:.3e}")
    print(f"weak residual      = {res.weak_residual:.3e}")
    print(f"positive inside    = {res.positive_inside}")
    print(f"decay bound slack  = {bound.worst_slack:+.3e}")
    with open(args.out, "w") as handle:
        handle.write(profile_to_csv(res.profile))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
