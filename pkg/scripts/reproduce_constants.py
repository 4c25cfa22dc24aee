#!/usr/bin/env python3
"""Print the derived constants and best-constant report for a parameter tuple.

Usage: python scripts/reproduce_constants.py [--params P ALPHA0 ALPHA1 THETA]
"""

import argparse

from hslog import bliss
from hslog.params import check_identities, derived_constants, validate_params


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--params", nargs=4, type=float, default=[2, 2, 2, 2],
                    metavar=("P", "ALPHA0", "ALPHA1", "THETA"))
    args = ap.parse_args()

    ps = validate_params(*args.params)
    dc = derived_constants(ps)
    ident = check_identities(dc)
    rep = bliss.compute_S(dc)

    print(f"parameters: p={ps.p:g} alpha0={ps.alpha0:g} alpha1={ps.alpha1:g} "
          f"theta={ps.theta:g}")
    print(f"p*        = {dc.p_star:.12g}")
    print(f"s, n, m   = {dc.s:.12g}, {dc.n:.12g}, {dc.m:.12g}")
    print(f"c_hat     = {dc.c_hat:.12g}")
    print(f"kappa     = {dc.kappa:.12g}")
    print(f"beta_max  = {dc.beta_max:.12g}")
    print(f"identity residual = {ident.max_residual:.3e} (pass={ident.passed})")
    print(f"S         = {rep.S:.12g}")
    print(f"S_power   = {rep.S_power:.12g}")
    print(f"sigma_p   = {rep.sigma_p:.12g}")
    print(f"integral agreement = {rep.rel_disagreement:.3e}")


if __name__ == "__main__":
    main()
