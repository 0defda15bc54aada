"""
Main CLI file
Surgery calculus: plans, presets, plumbings and twist words
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from surgery import __version__, config
from surgery import commands
from surgery.commands import status
from surgery.errors import SurgeryError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='surgery',
        description="Exact bookkeeping for blow-ups, rational blowdowns and Dehn-twist words.",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--log-level', default=config.LOG_LEVEL,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help="logging level (default: %(default)s)")
    subparsers = parser.add_subparsers(dest='command', required=True)

    commands.run.register(subparsers)
    commands.case.register(subparsers)
    commands.blowdown.register(subparsers)
    commands.mcg.register(subparsers)
    commands.report.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, dispatch to a subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return config.EXIT_OK if e.code in (0, None) else config.EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, args.log_level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return args.handler(args)
    except SurgeryError as e:
        status('fail', str(e))
        return e.exit_code
    except KeyboardInterrupt:
        status('warn', "interrupted")
        return config.EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
