import argparse
import json
import logging
import sys
import time
import traceback
from dataclasses import replace

from config import (
    EXIT_INPUT,
    EXIT_INTERNAL,
    EXIT_NO_INPUT,
    EXIT_USAGE,
    LOG_LEVEL,
    TOLERANCE,
)
from criteria import CriterionError
from functional import FunctionalError
from geometry import GeometryError
from handlers.csck import csck_handler
from handlers.describe import describe_handler
from handlers.destabilizer import destabilizer_handler
from handlers.evaluate import evaluate_handler
from handlers.fano import fano_handler
from handlers.oracle import oracle_handler
from hilbert import HilbertBudgetError
from reports import Report, emit_report, exit_code
from spherical import SphericalDataError

logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    level=LOG_LEVEL,
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

COMMANDS = {
    "describe": describe_handler,
    "check-fano": fano_handler,
    "check-csck": csck_handler,
    "eval-L": evaluate_handler,
    "search": destabilizer_handler,
    "hilbert": oracle_handler,
}


class UsageError(Exception):
    pass


INPUT_ERRORS = (SphericalDataError, FunctionalError, GeometryError, json.JSONDecodeError, UnicodeDecodeError)


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="spherik", description="cscK / Kahler-Einstein verdicts for polarized spherical varieties")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("input", help="spherical data document (JSON)")
    parser.add_argument("--f", help="PL function document (JSON)")
    parser.add_argument("--tol", type=float, default=TOLERANCE)
    parser.add_argument("--m", type=int, help="number of affine pieces for the search")
    parser.add_argument("--budget", type=int, help="number of search restarts")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--kmax", type=int, help="largest dilation for the Hilbert oracle")
    parser.add_argument("--format", choices=("json", "text"), default="text")
    parser.add_argument("--record", action="store_true", help="store the search result in the run ledger")
    parser.add_argument("--history", action="store_true", help="list recorded searches for this input")
    parser.add_argument("--no-search", action="store_true", help="fail instead of searching when no criterion applies")
    parser.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    return parser


def error_handler(error: BaseException) -> int:
    """Map an exception escaping a command to an exit code, logging it."""
    if isinstance(error, (UsageError, CriterionError, HilbertBudgetError)):
        logger.error(f"Usage: {error}")
        return EXIT_USAGE
    if isinstance(error, FileNotFoundError):
        logger.error(f"Missing input: {error}")
        return EXIT_NO_INPUT
    if isinstance(error, INPUT_ERRORS):
        logger.error(f"Invalid input: {error}")
        return EXIT_INPUT
    logger.error(f"Unhandled exception: {error}")
    logger.error(traceback.format_exc())
    return EXIT_INTERNAL


def run(argv: list[str] | None = None) -> tuple[int, Report | None]:
    try:
        args = build_parser().parse_args(argv)
        started = time.perf_counter()
        report = COMMANDS[args.command](args)
        elapsed = time.perf_counter() - started
        logger.info(f"{args.command} finished in {elapsed:.3f}s")
        report = replace(report, timing=elapsed)
        print(emit_report(report, args.format, include_timing=args.timing), end="")
        return exit_code(report), report
    except Exception as e:
        return error_handler(e), None


def main():
    code, _ = run(sys.argv[1:])
    sys.exit(code)


if __name__ == "__main__":
    main()
