#!/usr/bin/env python3
"""Scan the bubble family: norm deviations, concentration growth, level gaps.

Usage: python scripts/bubble_asymptotics.py [--beta B] [--tau T] [--grid-m M]
"""

import argparse

import numpy as np

from hslog import bliss
from hslog.analysis import mountain_pass_gap, rate_fit
from hslog.functionals import LogParams
from hslog.params import derived_constants, validate_params
from hslog.radial import make_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--tau", type=float, default=1.0)
    ap.add_argument("--grid-m", type=int, default=4000)
    ap.add_argument("--r0", type=float, default=0.2)
    args = ap.parse_args()

    ps = validate_params(2, 2, 2, 2)
    dc = derived_constants(ps)
    rep = bliss.compute_S(dc)
    grid = make_grid(args.grid_m, 3.0)
    lp = LogParams(args.tau, args.beta)

    eps_list = (1e-2, 1e-3, 1e-4, 1e-5)
    table_d, table_l = bliss.bubble_norm_scan(eps_list, dc, r0=args.r0)
    print(f"Dirichlet deviation exponent: {table_d.fitted_exponent:.4f} "
          f"(expected s*p = {dc.s * ps.p:g})")
    print(f"L^p* deviation exponent:      {table_l.fitted_exponent:.4f} "
          f"(expected s*p* = {dc.s * 6:g})")

    a_hat = bliss.unit_norm_a_hat(rep, dc)
    rows = []
    for eps in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
        u = bliss.bubble_profile(bliss.BubbleSpec(eps, a_hat, args.r0), grid, dc)
        rows.append((eps, bliss.concentration_E(0.0, 1.0, u, 1.0, lp, ps)))
    table_e = rate_fit(rows, model="power-times-loglog")
    print(f"concentration growth exponent: {table_e.fitted_exponent:.4f} "
          f"(expected beta = {args.beta:g})")

    print("level gaps (threshold - max_t I(t u_eps)):")
    for eps in (1e-3, 1e-4, 1e-5):
        mp = mountain_pass_gap(bliss.BubbleSpec(eps, 1.0, args.r0), lp, ps, grid,
                               report=rep)
        print(f"  eps={eps:8.0e}  max_I={mp.max_energy:.8f}  gap={mp.gap:+.3e}")


if __name__ == "__main__":
    main()
