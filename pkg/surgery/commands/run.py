"""
surgery run <plan>
"""

import logging
from pathlib import Path

from surgery import config
from surgery.commands import add_output_options, emit, status
from surgery.errors import SurgeryError
from surgery.plan import load_plan
from surgery.runner import run

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser('run', help="execute a plan file")
    parser.add_argument('plan', type=Path, help="path to a .plan file")
    add_output_options(parser)
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    name = args.plan.stem
    try:
        plan = load_plan(args.plan)
        report = run(plan)
    except SurgeryError as e:
        status('fail', config.MESSAGES['plan_failed'].format(name=name, error=e))
        return e.exit_code

    logger.info("plan %s: %d statements, %d entries", name, len(plan), len(report))
    emit(report, args.format, args.output)
    status('ok', config.MESSAGES['plan_ok'].format(name=name, entries=len(report)))
    return config.EXIT_OK
