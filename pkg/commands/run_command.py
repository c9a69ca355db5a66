import argparse
import logging
import sys
import time

from config.settings import DEFAULT_TOL, MAX_D
from quantum.histories import ConsistencyCondition
from scenarios.builtin import SCENARIO_NAMES, get_scenario
from scenarios.spec_loader import build_scenario, load_spec
from services.analysis import analyze
from services.summary import render_report
from utils.errors import SpecError

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("run", help="Run CH and ABL analyses on a scenario")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--scenario", choices=SCENARIO_NAMES, help="Built-in scenario")
    source.add_argument("--spec", help="Path to a declarative scenario file (JSON)")
    parser.add_argument("--d", type=int, default=2, help="Subsystem dimension for the hm scenario")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL, help="Consistency tolerance")
    parser.add_argument("--condition", choices=[c.value for c in ConsistencyCondition],
                        default=ConsistencyCondition.FULL_DIAGONALITY.value,
                        help="Condition gating the consistent-histories probabilities")
    parser.add_argument("--swap-order", action="store_true",
                        help="hm: measure the (b_tilde, b) pair before (r_b, b)")
    parser.add_argument("--max-d", type=int, default=MAX_D,
                        help="Largest d accepted for the hm scenario")
    parser.add_argument("--timing", action="store_true", help="Add a timing block to the report")
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> int:
    if args.tol < 0:
        raise SpecError(f"--tol must be non-negative, got {args.tol}")

    started = time.perf_counter()
    if args.spec:
        scenario = build_scenario(load_spec(args.spec))
        source = "spec"
    else:
        if args.scenario == "hm" and args.d > args.max_d:
            raise SpecError(
                f"d={args.d} is above the permitted maximum {args.max_d} "
                f"(total dim {args.d ** 4}); raise it with --max-d"
            )
        scenario = get_scenario(args.scenario, d=args.d, swap_order=args.swap_order)
        source = "builtin"
    build_seconds = time.perf_counter() - started
    logger.debug("built scenario %r (dim %d) in %.3fs", scenario.name, scenario.space.total_dim, build_seconds)

    report = analyze(
        scenario,
        source=source,
        condition=ConsistencyCondition(args.condition),
        tol=args.tol,
        build_seconds=build_seconds if args.timing else None,
    )

    if args.format == "json":
        sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    else:
        sys.stdout.write(render_report(report))
    return 0
