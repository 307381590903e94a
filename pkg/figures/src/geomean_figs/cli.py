"""Command-line wrappers over the figure builders.

Exit codes: 0 success, 1 bad inputs or solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .io import FigureInputError
from .plots import plot_constant_curves, plot_gap_sweep, plot_sphere_scatter
from .projection import cluster_concentration


def main(argv=None):
    parser = argparse.ArgumentParser(prog="geomean-figs",
                                     description="figures from solver CLI outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_scatter = sub.add_parser("scatter", help="equal-area sphere scatter panels")
    p_scatter.add_argument("--instance", required=True)
    p_scatter.add_argument("--csv", action="append", required=True,
                           metavar="K=PATH", help="per-level sample dump, repeatable")
    p_scatter.add_argument("--out", required=True)
    p_scatter.add_argument("--cluster-stats", action="store_true",
                           help="print the 12-cluster concentration of each level")

    p_const = sub.add_parser("constants", help="curves of the level-k rounding factor")
    p_const.add_argument("--out", required=True)
    p_const.add_argument("--table", default=None, help="pre-dumped table JSON (else call the solver CLI)")
    p_const.add_argument("--solver-cmd", default="geomean-opt")

    p_gap = sub.add_parser("gap", help="gap-sweep ratio plot")
    p_gap.add_argument("--record", required=True)
    p_gap.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "scatter":
            csv_paths = {}
            for item in args.csv:
                if "=" not in item:
                    raise FigureInputError(f"--csv wants K=PATH, got {item!r}")
                k, path = item.split("=", 1)
                csv_paths[int(k)] = path
            plot_sphere_scatter(csv_paths, args.instance, args.out)
            if args.cluster_stats:
                from .io import read_sample_csv

                stats = {k: cluster_concentration(read_sample_csv(p).points)
                         for k, p in sorted(csv_paths.items())}
                print(json.dumps({"cluster_concentration": stats}))
        elif args.command == "constants":
            plot_constant_curves(args.out, args.table, args.solver_cmd)
        else:
            plot_gap_sweep(args.record, args.out)
    except (FigureInputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
