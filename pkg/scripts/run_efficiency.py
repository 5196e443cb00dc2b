#!/usr/bin/env python3
"""Time-integrator efficiency comparison on the traveling vortex: cycles to
reach the final time, throughput per forward-Euler substep, and runtime."""

import argparse

from swgraph.driver import simulate
from swgraph.scenarios import get_scenario
from swgraph.timestepping import scheme_names


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cells", type=int, default=256)
    ap.add_argument("--t-final", type=float, default=0.5)
    ap.add_argument("--cfl", type=float, default=0.2)
    ap.add_argument("--schemes", nargs="+",
                    default=["RK(2,2;1/2)", "RK(2,2;1)", "RK(3,3;1/3)",
                             "RK(3,3;1)", "RK(4,3;1)", "RK(5,4;1)"])
    args = ap.parse_args()

    sc = get_scenario("vortex")
    print(f"vortex, {args.cells}^2 cells, T={args.t_final:g}, CFL {args.cfl:g}")
    print(f"{'scheme':>14} {'cycles':>8} {'MQ/s':>8} {'wall[s]':>9}")
    for scheme in args.schemes:
        if scheme not in scheme_names():
            raise SystemExit(f"unknown scheme {scheme}")
        res = simulate(sc, cells=args.cells, t_final=args.t_final,
                       cfl=args.cfl, scheme=scheme)
        print(f"{scheme:>14} {res.cycles:>8} {res.throughput_mqs:>8.3f} "
              f"{res.wall_time:>9.2f}")


if __name__ == "__main__":
    main()
