"""
surgery report <file.kv> --format ...
"""

from pathlib import Path

from surgery import config
from surgery.commands import add_output_options, emit, status
from surgery.errors import SurgeryError
from surgery.report import load_kv


def register(subparsers) -> None:
    parser = subparsers.add_parser('report', help="re-render a kv report")
    parser.add_argument('input', type=Path, help="a key=value report file")
    add_output_options(parser)
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    try:
        report = load_kv(args.input)
        emit(report, args.format, args.output)
    except SurgeryError as e:
        status('fail', str(e))
        return e.exit_code
    return config.EXIT_OK
