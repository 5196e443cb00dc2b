#!/usr/bin/env python3
"""Convergence tables for the traveling vortex and the paraboloid basin."""

import argparse

import numpy as np

from swgraph.driver import simulate
from swgraph.scenarios import error_norm, get_scenario


def table(name, levels, scheme, cfl=None):
    sc = get_scenario(name)
    print(f"\n{name} [{scheme}] T={sc.t_final:g}")
    print(f"{'nodes':>9} {'delta1':>12} {'rate':>6} {'wall[s]':>8}")
    prev = None
    for n in levels:
        res = simulate(sc, cells=n, scheme=scheme, cfl=cfl)
        exact = sc.exact_fields(res.graph.coords, res.t)
        err = error_norm(res.fields, exact, 1, res.graph)
        rate = "" if prev is None else f"{np.log2(prev / err):6.2f}"
        print(f"{res.graph.node_count:>9} {err:>12.5e} {rate:>6} {res.wall_time:>8.1f}")
        prev = err


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, nargs="+", default=[32, 64, 128])
    ap.add_argument("--scheme", default="RK(3,3;1)")
    ap.add_argument("--case", choices=["vortex", "paraboloid", "both"], default="both")
    args = ap.parse_args()
    if args.case in ("vortex", "both"):
        table("vortex", args.levels, args.scheme)
    if args.case in ("paraboloid", "both"):
        table("paraboloid", args.levels, args.scheme)


if __name__ == "__main__":
    main()
