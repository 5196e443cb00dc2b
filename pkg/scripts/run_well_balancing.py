#!/usr/bin/env python3
"""Well-balancing tables: lake at rest over the three-bump topography and
the steady frictional flow on an incline, for a pair of mesh levels."""

import argparse

import numpy as np

from swgraph.driver import simulate
from swgraph.scenarios import error_norm, get_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, nargs="+", default=[64, 128],
                    help="cells per direction for the rest test")
    ap.add_argument("--schemes", nargs="+", default=["RK(3,3;1)", "RK(3,3;1/3)"])
    args = ap.parse_args()

    print("three-bump lake at rest, T=100 s, CFL 0.9")
    print(f"{'nodes':>8}  " + "  ".join(f"{s:>14}" for s in args.schemes))
    for n in args.levels:
        row = []
        nodes = None
        for scheme in args.schemes:
            sc = get_scenario("three_bumps")
            res = simulate(sc, cells=n, scheme=scheme)
            h0, _ = sc.initial(res.graph.coords)
            row.append(np.abs(res.fields.h - h0).max())
            nodes = res.graph.node_count
        print(f"{nodes:>8}  " + "  ".join(f"{v:>14.3e}" for v in row))

    print("\nsteady incline with friction, T=100 s, CFL 0.5 (delta_inf)")
    print(f"{'nodes':>8}  " + "  ".join(f"{s:>14}" for s in args.schemes))
    for n in (512, 1024):
        row = []
        nodes = None
        for scheme in args.schemes:
            sc = get_scenario("inclined_friction")
            res = simulate(sc, cells=n, scheme=scheme)
            exact = sc.exact_fields(res.graph.coords, res.t)
            row.append(error_norm(res.fields, exact, np.inf, res.graph))
            nodes = res.graph.node_count
        print(f"{nodes:>8}  " + "  ".join(f"{v:>14.3e}" for v in row))


if __name__ == "__main__":
    main()
