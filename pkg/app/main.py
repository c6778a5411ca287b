"""
ratfun - command-line toolkit for rational word functions.

Reads machines in the shared text format and runs the evaluation, conversion,
canonical-bimachine and definability pipelines on them. Results go to standard
output; logs and diagnostics go to standard error.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from app import __version__
from app.cli import CommandResult, router
from app.config import get_settings
from app.exceptions import RatfunError
from app.services.converter import MachineConverter

logger = logging.getLogger(__name__)

INTERNAL_ERROR = 70


def configure_logging(verbosity: int) -> None:
    """Log to standard error; each ``-v`` lowers the threshold one level."""
    settings = get_settings()
    level = logging.getLevelName(settings.log_level.upper())
    if not isinstance(level, int):
        level = logging.WARNING
    if verbosity:
        level = logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=settings.log_format, stream=sys.stderr, force=True)


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser with one sub-command per verb."""
    settings = get_settings()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "yaml"), default="text", help="Output format")
    common.add_argument("-o", "--output", default=None, help="Write the result to this file")
    common.add_argument("-v", "--verbose", action="count", default=0, help="More logging (-vv for debug)")

    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Automata, transducers, bimachines and definability of rational functions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="verb", metavar="VERB", required=True)
    router.install(subparsers, parents=[common])
    return parser


def emit(result: CommandResult, output_format: str, output: Optional[str]) -> None:
    """Write the result and its trailer lines."""
    if output_format == "yaml":
        body = MachineConverter.to_yaml(result.data)
    else:
        body = result.text
    if output:
        Path(output).write_text(body, encoding="utf-8")
        logger.info(f"Wrote {output}")
    else:
        sys.stdout.write(body)
    for key, value in result.trailer.items():
        print(f"{key}={value}", file=sys.stderr)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the verb and return the process exit code."""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    configure_logging(args.verbose)
    logger.debug(f"Running {args.verb}")
    try:
        result = args.handler(args)
        emit(result, args.format, args.output)
        return result.exit_code
    except RatfunError as exc:
        logger.info(f"{args.verb} failed: {exc.message}")
        print(f"error: {exc.message}", file=sys.stderr)
        for line in exc.trailer():
            print(line, file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        logger.error(f"Unhandled exception: {exc}", exc_info=True)
        print(f"error: internal error: {exc}", file=sys.stderr)
        return INTERNAL_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
