"""Command-line entry point: ``fermipoisson <command> --scenario PATH``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import linalg
from .errors import FermiPoissonError
from .runner import run
from .scenario import TASKS, bundled_scenarios, parse_scenario

OUT_ENV = "FERMIPOISSON_OUT"
DEFAULT_OUT = "fermipoisson_out"


def _add_common(p):
    p.add_argument("--scenario", required=True,
                   help="scenario JSON path, '-' for stdin, or a bundled scenario name")
    p.add_argument("--out", default=None,
                   help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    p.add_argument("--tol", type=float, default=None, help="override the scenario tolerance")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--size-cap", type=int, default=None,
                   help=f"max entries per dense matrix (default {linalg.DEFAULT_SIZE_CAP})")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermipoisson",
        description="Moments and multi-time correlations of fermionic Poisson-type GKSL dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for task in TASKS:
        _add_common(sub.add_parser(task, help=f"run the {task} task"))
    _add_common(sub.add_parser("run", help="run every task listed in the scenario"))
    sub.add_parser("list-scenarios", help="print the names of bundled scenarios")
    return parser


def _summary(report) -> str:
    lines = []
    for task, result in report["tasks"].items():
        status = "PASS" if result["passed"] else "FAIL"
        detail = ""
        if "max_residual" in result:
            detail = f" max residual {result['max_residual']:.3e}"
        elif "failed" in result and result["failed"]:
            detail = " failed: " + ", ".join(result["failed"])
        elif "runs" in result:
            worst = max(r["error"] / r["bound"] for r in result["runs"])
            detail = f" worst error/bound {worst:.3f}"
        lines.append(f"{task}: {status}{detail}")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-scenarios":
        print("\n".join(bundled_scenarios()))
        return 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.size_cap is not None:
        linalg.set_size_cap(args.size_cap)
    out = args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT
    tasks = None if args.command == "run" else [args.command]
    try:
        scenario = parse_scenario(args.scenario)
        report = run(scenario, tasks=tasks, out_dir=out, tol=args.tol, threads=args.threads)
    except FermiPoissonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(_summary(report))
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
