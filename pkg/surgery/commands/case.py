"""
surgery case <name> | surgery case --list
"""

import logging

from surgery import config
from surgery.commands import add_output_options, emit, status
from surgery.errors import PlanArityError, SurgeryError
from surgery.report import load_kv, to_kv
from surgery.runner import case_names, run_case

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser('case', help="run a shipped case preset")
    parser.add_argument('name', nargs='?', help="case name, e.g. viii_case1 or v-vstar")
    parser.add_argument('--list', action='store_true', help="list the shipped cases")
    parser.add_argument('--check', action='store_true',
                        help="compare the report with its golden file instead of printing it")
    add_output_options(parser)
    parser.set_defaults(handler=handle)


def _list() -> int:
    print("=" * 50)
    print(f"{config.EMOJIS['report']} CASES")
    print("=" * 50)
    for name in case_names():
        print(f"  {name:<12} {config.PRESETS_DIR / config.CASES[name]}")
    return config.EXIT_OK


def _check(name: str, report) -> int:
    path = config.GOLDEN_DIR / f"{name.replace('-', '_')}.kv"
    expected = load_kv(path)
    if expected.items() == report.items():
        status('ok', f"{name} matches {path.name} ({len(report)} entries)")
        return config.EXIT_OK

    observed = dict(report.items())
    golden = dict(expected.items())
    for key in list(golden) + [k for k in observed if k not in golden]:
        if golden.get(key) != observed.get(key):
            status('fail', f"{key}: golden {golden.get(key)}, computed {observed.get(key)}")
    if list(golden) != list(observed) and golden == observed:
        status('fail', "same entries in a different order")
    logger.debug("computed report for %s:\n%s", name, to_kv(report))
    return config.EXIT_FAILED


def handle(args) -> int:
    if args.list:
        return _list()
    if not args.name:
        status('fail', "case needs a name or --list")
        return PlanArityError.exit_code

    try:
        plan, report = run_case(args.name)
        if args.check:
            return _check(args.name, report)
    except SurgeryError as e:
        status('fail', config.MESSAGES['plan_failed'].format(name=args.name, error=e))
        return e.exit_code

    emit(report, args.format, args.output)
    status('ok', config.MESSAGES['plan_ok'].format(name=plan.name, entries=len(report)))
    return config.EXIT_OK
