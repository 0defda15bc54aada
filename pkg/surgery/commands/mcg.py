"""
surgery mcg verify <derivation> | surgery mcg identity <word> --genus <g>
"""

import logging

from surgery import config
from surgery.commands import status
from surgery.errors import SurgeryError
from surgery.mcg import (
    TwistWord,
    chain_word,
    hyperelliptic_word,
    is_identity,
    k3_monodromy,
    load_derivation,
    verify_derivation,
    word_to_matrix,
)

logger = logging.getLogger(__name__)

NAMED_WORDS = {
    'hyperelliptic': hyperelliptic_word,
    'chain': chain_word,
}


def register(subparsers) -> None:
    parser = subparsers.add_parser('mcg', help="Dehn-twist words and derivations")
    actions = parser.add_subparsers(dest='action', required=True)

    verify = actions.add_parser('verify', help="replay a derivation file and classify its blocks")
    verify.add_argument('derivation', help="path or name of a .deriv file")
    verify.set_defaults(handler=handle_verify)

    identity = actions.add_parser('identity', help="check that a word acts trivially on H1")
    identity.add_argument('word', help="twist word, or one of: hyperelliptic, chain, k3")
    identity.add_argument('--genus', '-g', type=int, default=2)
    identity.set_defaults(handler=handle_identity)


def handle_verify(args) -> int:
    try:
        derivation = load_derivation(args.derivation)
        result = verify_derivation(derivation)
    except SurgeryError as e:
        status('fail', str(e))
        return e.exit_code

    name = derivation.name
    if not result['success']:
        error = result['error'] or "word matrices or blocks disagree with the end word"
        status('fail', config.MESSAGES['derivation_failed'].format(
            name=name, step=result['failing_step'], error=error))
        return config.EXIT_FAILED

    status('ok', config.MESSAGES['derivation_ok'].format(name=name, moves=len(derivation.moves)))
    for index, (block, info) in enumerate(zip(derivation.blocks, result['blocks']), 1):
        print(config.MESSAGES['block_line'].format(index=index, word=block, kind=info['label']))
    return config.EXIT_OK


def handle_identity(args) -> int:
    try:
        if args.word == 'k3':
            word = k3_monodromy()
        elif args.word in NAMED_WORDS:
            word = NAMED_WORDS[args.word](args.genus)
        else:
            word = TwistWord.parse(args.word, args.genus)
        matrix = word_to_matrix(word)
    except SurgeryError as e:
        status('fail', str(e))
        return e.exit_code

    trivial = is_identity(matrix)
    logger.debug("word %s has matrix\n%s", word, matrix)
    print(config.MESSAGES['matrix_identity'].format(result='the identity' if trivial else 'a non-identity matrix'))
    return config.EXIT_OK if trivial else config.EXIT_FAILED
