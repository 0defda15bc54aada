"""
surgery blowdown <p> <q>
"""

from surgery import config
from surgery.blowdown import plumbing_chain
from surgery.commands import status
from surgery.errors import SurgeryError
from surgery.report import format_value


def register(subparsers) -> None:
    parser = subparsers.add_parser('blowdown', help="plumbing data of the chain C_{p,q}")
    parser.add_argument('p', type=int)
    parser.add_argument('q', type=int)
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    try:
        chain = plumbing_chain(args.p, args.q)
    except SurgeryError as e:
        status('fail', str(e))
        return config.EXIT_USAGE

    print("=" * 50)
    print(f"{config.EMOJIS['report']} C_{{{args.p},{args.q}}}")
    print("=" * 50)
    print(config.MESSAGES['chain_weights'].format(weights=' '.join(str(w) for w in chain.weights)))
    print(config.MESSAGES['chain_fraction'].format(value=chain.value))
    print(config.MESSAGES['chain_determinant'].format(det=chain.determinant))
    print(config.MESSAGES['chain_boundary'].format(boundary=chain.lens_label))
    print(config.MESSAGES['chain_inverse'].format(column=format_value(list(chain.inverse()[:, 0]))))
    return config.EXIT_OK
