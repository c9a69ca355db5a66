import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from models.models import ScenarioSpec
from scenarios.spec_loader import collect_diagnostics, malformed_diagnostics
from services.summary import render_diagnostics
from utils.errors import SpecError

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("validate", help="Check a scenario file without running analyses")
    parser.add_argument("spec_path")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.set_defaults(func=validate)


def validate(args: argparse.Namespace) -> int:
    try:
        text = Path(args.spec_path).read_text(encoding="utf-8")
    except OSError as e:
        raise SpecError(f"cannot read spec file {args.spec_path}: {e}")

    try:
        spec = ScenarioSpec.model_validate_json(text)
        diagnostics = collect_diagnostics(spec)
    except ValidationError as e:
        diagnostics = malformed_diagnostics(e)

    for d in diagnostics:
        logger.warning("%s at %s: %s", d.code, d.location, d.message)

    if args.format == "json":
        payload = [d.model_dump() for d in diagnostics]
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        sys.stdout.write(render_diagnostics(diagnostics))
    return 2 if diagnostics else 0
