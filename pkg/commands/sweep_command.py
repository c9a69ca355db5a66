import argparse
import sys

from config.settings import MAX_D
from services.analysis import sweep_report
from services.summary import render_sweep
from utils.errors import DegenerateDimensionError, SpecError


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="Compare the hm scenario with its closed forms over d")
    parser.add_argument("--d-min", type=int, default=2)
    parser.add_argument("--d-max", type=int, default=6)
    parser.add_argument("--max-d", type=int, default=MAX_D)
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.set_defaults(func=sweep)


def sweep(args: argparse.Namespace) -> int:
    if args.d_min < 2:
        raise DegenerateDimensionError(f"--d-min must be >= 2, got {args.d_min}")
    if args.d_max < args.d_min or args.d_max > args.max_d:
        raise SpecError(f"--d-max must lie in [{args.d_min}, {args.max_d}], got {args.d_max}")

    report = sweep_report(args.d_min, args.d_max)
    if args.format == "json":
        sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    else:
        sys.stdout.write(render_sweep(report))
    return 0 if report.agrees else 1
