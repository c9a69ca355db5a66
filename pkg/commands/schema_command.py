import argparse
import json
import sys

from models.models import Report, ScenarioSpec

SCHEMAS = {"report": Report, "spec": ScenarioSpec}


def register(subparsers) -> None:
    parser = subparsers.add_parser("schema", help="Print the JSON schema of reports or scenario files")
    parser.add_argument("which", nargs="?", choices=sorted(SCHEMAS), default="report")
    parser.set_defaults(func=schema)


def schema(args: argparse.Namespace) -> int:
    sys.stdout.write(json.dumps(SCHEMAS[args.which].model_json_schema(), indent=2, sort_keys=True) + "\n")
    return 0
