# Command-line entry point: pre/post-selected histories toolkit
import argparse
import logging
import sys
from typing import List, Optional

from commands.run_command import register as register_run
from commands.schema_command import register as register_schema
from commands.sweep_command import register as register_sweep
from commands.validate_command import register as register_validate
from config.settings import LOG_LEVEL
from utils.errors import AnalysisError

logger = logging.getLogger("histories")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="histories",
        description="Consistent-histories and ABL probabilities for pre- and post-selected systems",
    )
    parser.add_argument("--log-level", default=LOG_LEVEL, help="Logging level (stderr)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    register_run(subparsers)
    register_validate(subparsers)
    register_sweep(subparsers)
    register_schema(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.func(args)
    except AnalysisError as e:
        logger.error("%s: %s", e.code, e.detail)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
