"""
Subcommands
"""

import sys
from pathlib import Path
from typing import Optional

from surgery import config
from surgery.report import Report, render, write_report

__all__ = ['run', 'case', 'blowdown', 'mcg', 'report', 'add_output_options', 'emit', 'status']


def status(kind: str, message: str) -> None:
    """Status lines go to stderr so stdout carries only the report."""
    print(f"{config.EMOJIS[kind]} {message}", file=sys.stderr)


def add_output_options(parser) -> None:
    parser.add_argument('--format', '-f', choices=config.REPORT_FORMATS, default=config.REPORT_FORMAT,
                        help="report format (default: %(default)s)")
    parser.add_argument('--output', '-o', type=Path, default=None,
                        help="write the report to this file instead of stdout")


def emit(report: Report, fmt: str, output: Optional[Path] = None) -> None:
    """Print a text format or write any format to a file."""
    if output is None and fmt in ('text', 'kv', 'json'):
        sys.stdout.write(render(report, fmt))
        return
    path = write_report(report, fmt, output)
    status('export', config.MESSAGES['report_written'].format(path=path))


from . import blowdown, case, mcg, report, run  # noqa: E402
