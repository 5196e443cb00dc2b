"""Command-line driver.

``swgraph run CONFIG [--output DIR] [--cfl X] [--mesh N] [--scheme NAME]``
runs one configured simulation; ``swgraph verify SUITE`` runs an acceptance
suite.  Exit codes: 0 success, 1 tolerance failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .scenarios import scenario_names
from .timestepping import scheme_names
from .verification import SUITE_ORDER, run_suite


def _build_parser():
    parser = argparse.ArgumentParser(prog="swgraph")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a configured simulation")
    run_p.add_argument("config", help="path to the config file")
    run_p.add_argument("--output", help="override the output directory")
    run_p.add_argument("--cfl", type=float, help="override the CFL number")
    run_p.add_argument("--mesh", type=int, help="override cells per direction")
    run_p.add_argument("--scheme", help="override the time integrator "
                       f"({', '.join(scheme_names())})")

    ver_p = sub.add_parser("verify", help="run an acceptance suite")
    ver_p.add_argument("suite", help=f"one of {', '.join(SUITE_ORDER)} or 'all'")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        try:
            cfg = load_config(args.config)
            if args.output is not None:
                cfg.output_dir = args.output
            if args.cfl is not None:
                cfg.cfl = args.cfl
            if args.mesh is not None:
                cfg.cells = args.mesh
            if args.scheme is not None:
                cfg.scheme = args.scheme
            cfg.validate()
            if cfg.scenario not in scenario_names():
                raise ConfigError(f"unknown scenario {cfg.scenario!r}; available: "
                                  f"{', '.join(scenario_names())}")
            if cfg.scheme is not None and cfg.scheme not in scheme_names():
                raise ConfigError(f"unknown scheme {cfg.scheme!r}; available: "
                                  f"{', '.join(scheme_names())}")
        except (ConfigError, OSError) as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return 2
        from .driver import run
        report, _ = run(cfg)
        print(report.text())
        return 0

    if args.command == "verify":
        try:
            ok = run_suite(args.suite)
        except ValueError as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return 2
        return 0 if ok else 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
