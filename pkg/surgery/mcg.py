"""
Dehn twist words on the standard chain a1, ..., a(2g+1) of a genus g surface.

Words are rewritten by Hurwitz moves, braid and commutation relations and
inverse-pair insertion; derivation files replay such rewrites and are checked
letter for letter. The action on first homology (symplectic transvections)
gives an independent test that a rewrite kept the word's value.
"""

import logging
import re
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from surgery import config
from surgery.errors import DerivationFormatError, HomologyError, MoveError

logger = logging.getLogger(__name__)

Letter = Tuple[int, int]

_TOKEN = re.compile(r"a(\d+)(?:\^(-?\d+))?$")


def letter_text(letter: Letter) -> str:
    index, exponent = letter
    return f"a{index}" if exponent == 1 else f"a{index}^{exponent}"


def inverse_letter(letter: Letter) -> Letter:
    return letter[0], -letter[1]


def parse_letters(token: str) -> List[Letter]:
    """'a3' -> [(3, 1)], 'a3^-1' -> [(3, -1)], 'a5^2' -> [(5, 1), (5, 1)]"""
    match = _TOKEN.match(token)
    if not match:
        raise MoveError(token, 0, f"'{token}' is not a twist letter")
    index = int(match.group(1))
    power = int(match.group(2)) if match.group(2) else 1
    if power == 0:
        return []
    sign = 1 if power > 0 else -1
    return [(index, sign)] * abs(power)


@dataclass(frozen=True)
class TwistWord:
    genus: int
    letters: Tuple[Letter, ...] = ()

    def __post_init__(self):
        top = 2 * self.genus + 1
        for index, exponent in self.letters:
            if not 1 <= index <= top or exponent not in (1, -1):
                raise MoveError(letter_text((index, exponent)), 0,
                                f"letter outside a1..a{top} in genus {self.genus}")

    @classmethod
    def parse(cls, text: str, genus: int) -> "TwistWord":
        letters: List[Letter] = []
        for token in text.replace('(', ' ').replace(')', ' ').split():
            if token == '1':
                continue
            letters.extend(parse_letters(token))
        return cls(genus, tuple(letters))

    def __str__(self) -> str:
        return ' '.join(letter_text(x) for x in self.letters) or '1'

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "TwistWord") -> "TwistWord":
        if other.genus != self.genus:
            raise MoveError('*', 0, f"cannot multiply genus {self.genus} and genus {other.genus} words")
        return TwistWord(self.genus, self.letters + other.letters)

    def inverse(self) -> "TwistWord":
        return TwistWord(self.genus, tuple(inverse_letter(x) for x in reversed(self.letters)))

    def power(self, n: int) -> "TwistWord":
        base = self if n >= 0 else self.inverse()
        return TwistWord(self.genus, base.letters * abs(n))

    def free_reduce(self) -> "TwistWord":
        word: List[Letter] = []
        for letter in self.letters:
            if word and word[-1] == inverse_letter(letter):
                word.pop()
            else:
                word.append(letter)
        return TwistWord(self.genus, tuple(word))


# ═══════════════════════════════════════════════════════════════════════════════
# MOVES
# ═══════════════════════════════════════════════════════════════════════════════

MOVE_KINDS = ('HR', 'HL', 'BRAID', 'COMM', 'INS', 'CANCEL')


@dataclass(frozen=True)
class Move:
    kind: str
    position: int
    letter: Optional[Letter] = None

    def __post_init__(self):
        if self.kind not in MOVE_KINDS:
            raise MoveError(self.kind, self.position, f"unknown move kind, expected one of {MOVE_KINDS}")
        if (self.kind == 'INS') != (self.letter is not None):
            raise MoveError(self.kind, self.position, "INS takes exactly one letter; other moves take none")
        if self.position < 1:
            raise MoveError(self.kind, self.position, "positions start at 1")

    @classmethod
    def parse(cls, text: str) -> "Move":
        parts = text.split()
        if len(parts) not in (2, 3) or not parts[1].isdigit():
            raise MoveError(text, 0, "expected '<KIND> <position> [letter]'")
        letter = None
        if len(parts) == 3:
            letters = parse_letters(parts[2])
            if len(letters) != 1:
                raise MoveError(text, 0, "INS inserts a single letter")
            letter = letters[0]
        return cls(parts[0].upper(), int(parts[1]), letter)

    def __str__(self) -> str:
        if self.letter is None:
            return f"{self.kind} {self.position}"
        return f"{self.kind} {self.position} {letter_text(self.letter)}"


def _window(word: TwistWord, move: Move, size: int) -> List[Letter]:
    start = move.position - 1
    if start + size > len(word):
        raise MoveError(move, move.position, f"needs {size} letters from position {move.position}, word has {len(word)}")
    return list(word.letters[start:start + size])


def apply_move(word: TwistWord, move: Move) -> TwistWord:
    """Rewrite the word at a 1-based position; the result is equal in the mapping class group."""
    i = move.position - 1
    letters = list(word.letters)

    if move.kind == 'HR':
        x, y = _window(word, move, 2)
        letters[i:i + 2] = [x, y, inverse_letter(x), x]
    elif move.kind == 'HL':
        x, y = _window(word, move, 2)
        letters[i:i + 2] = [y, inverse_letter(y), x, y]
    elif move.kind == 'BRAID':
        x, y, z = _window(word, move, 3)
        if x != z or abs(x[0] - y[0]) != 1 or x[1] != y[1]:
            raise MoveError(move, move.position,
                            f"braid needs x y x on adjacent curves, found {letter_text(x)} {letter_text(y)} {letter_text(z)}")
        letters[i:i + 3] = [y, x, y]
    elif move.kind == 'COMM':
        x, y = _window(word, move, 2)
        if abs(x[0] - y[0]) == 1:
            raise MoveError(move, move.position,
                            f"a{x[0]} and a{y[0]} intersect and do not commute")
        letters[i:i + 2] = [y, x]
    elif move.kind == 'INS':
        if i > len(letters):
            raise MoveError(move, move.position, f"insertion point beyond word of length {len(word)}")
        letters[i:i] = [move.letter, inverse_letter(move.letter)]
    elif move.kind == 'CANCEL':
        x, y = _window(word, move, 2)
        if y != inverse_letter(x):
            raise MoveError(move, move.position,
                            f"{letter_text(x)} {letter_text(y)} is not an inverse pair")
        del letters[i:i + 2]

    return TwistWord(word.genus, tuple(letters))


# ═══════════════════════════════════════════════════════════════════════════════
# HOMOLOGY ACTION
# ═══════════════════════════════════════════════════════════════════════════════

def symplectic_form(genus: int) -> np.ndarray:
    identity = np.identity(genus, dtype=object)
    zero = np.zeros((genus, genus), dtype=object)
    return np.block([[zero, identity], [-identity, zero]])


def omega(u: np.ndarray, v: np.ndarray, genus: int) -> int:
    return int(u.dot(symplectic_form(genus)).dot(v))


@dataclass(frozen=True)
class ChainHomology:
    """Classes of the chain curves in H1 with basis x1..xg, y1..yg."""

    genus: int
    classes: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        size = 2 * self.genus
        if len(self.classes) != size + 1 or any(len(c) != size for c in self.classes):
            raise HomologyError(f"genus {self.genus} chain needs {size + 1} classes in Z^{size}")
        for i, first in enumerate(self.classes):
            if not any(first):
                raise HomologyError(f"c{i + 1} is zero")
            for j in range(i + 1, len(self.classes)):
                value = omega(self.vector(i + 1), self.vector(j + 1), self.genus)
                expected_adjacent = j == i + 1
                if expected_adjacent and abs(value) != 1:
                    raise HomologyError(f"<c{i + 1}, c{j + 1}> = {value}, adjacent curves need +-1")
                if not expected_adjacent and value != 0:
                    raise HomologyError(f"<c{i + 1}, c{j + 1}> = {value}, disjoint curves need 0")

    def vector(self, index: int) -> np.ndarray:
        return np.array(self.classes[index - 1], dtype=object)


def standard_chain(genus: int) -> ChainHomology:
    size = 2 * genus

    def unit(k: int) -> List[int]:
        v = [0] * size
        v[k] = 1
        return v

    classes = []
    for i in range(1, genus + 1):
        classes.append(unit(i - 1))
        y = unit(genus + i - 1)
        if i < genus:
            y = [a - b for a, b in zip(y, unit(genus + i))]
        classes.append(y)
    classes.append([1] * genus + [0] * genus)
    return ChainHomology(genus, tuple(tuple(c) for c in classes))


def twist_matrix(c: np.ndarray, genus: int, exponent: int = 1) -> np.ndarray:
    """x -> x + s <x, c> c for the configured sign s; exponent -1 gives the inverse."""
    sign = config.TWIST_SIGN * exponent
    outer = np.outer(c, c).dot(symplectic_form(genus))
    return np.identity(2 * genus, dtype=object) - sign * outer


def word_to_matrix(word: TwistWord, homology: Optional[ChainHomology] = None) -> np.ndarray:
    homology = homology or standard_chain(word.genus)
    result = np.identity(2 * word.genus, dtype=object)
    for index, exponent in word.letters:
        result = result.dot(twist_matrix(homology.vector(index), word.genus, exponent))
    return result


def is_symplectic(matrix: np.ndarray, genus: int) -> bool:
    form = symplectic_form(genus)
    return bool(np.array_equal(matrix.T.dot(form).dot(matrix), form))


def is_identity(matrix: np.ndarray) -> bool:
    return bool(np.array_equal(matrix, np.identity(matrix.shape[0], dtype=object)))


# ═══════════════════════════════════════════════════════════════════════════════
# BLOCK CLASSIFICATION
# ═══════════════════════════════════════════════════════════════════════════════

Core = Tuple[Tuple[Letter, ...], Letter]


def _split_conjugates(letters: Sequence[Letter], conjugator: Tuple[Letter, ...]) -> Optional[List[Core]]:
    """Read letters as a product of conjugates w a w^-1 of positive twists."""
    if not letters:
        return []
    first = letters[0]
    target = inverse_letter(first)
    for j in range(len(letters) - 1, 1, -1):
        if letters[j] != target:
            continue
        inner = _split_conjugates(letters[1:j], conjugator + (first,))
        if not inner:
            continue
        rest = _split_conjugates(letters[j + 1:], conjugator)
        if rest is not None:
            return inner + rest
    if first[1] > 0:
        rest = _split_conjugates(letters[1:], conjugator)
        if rest is not None:
            return [(conjugator, first)] + rest
    return None


def classify_block(block: TwistWord, homology: Optional[ChainHomology] = None) -> Dict[str, Any]:
    homology = homology or standard_chain(block.genus)
    cores = _split_conjugates(block.letters, ())
    if not cores:
        return {'kind': 'other', 'nodes': 0, 'classes': [], 'label': 'other'}

    classes = []
    for conjugator, (index, _) in cores:
        matrix = word_to_matrix(TwistWord(block.genus, conjugator), homology)
        classes.append(tuple(int(x) for x in matrix.dot(homology.vector(index))))

    nodes = len(classes)
    nonzero = all(any(c) for c in classes)
    disjoint = all(
        omega(np.array(u, dtype=object), np.array(v, dtype=object), block.genus) == 0
        for u, v in combinations(classes, 2)
    )
    independent = sympy.Matrix(classes).rank() == nodes

    if nodes == 1 and nonzero:
        kind, label = 'lefschetz_nodal', 'lefschetz nodal'
    elif nodes == block.genus and nonzero and disjoint and independent:
        kind, label = 'n_nodal_spherical', f"{nodes}-nodal spherical"
    else:
        kind, label = 'other', 'other'
    return {'kind': kind, 'nodes': nodes, 'classes': classes, 'label': label}


# ═══════════════════════════════════════════════════════════════════════════════
# STANDARD WORDS
# ═══════════════════════════════════════════════════════════════════════════════

def chain_letters(indices: Sequence[int], genus: int) -> TwistWord:
    return TwistWord(genus, tuple((i, 1) for i in indices))


def hyperelliptic_word(genus: int) -> TwistWord:
    """(a1 ... a2g a2g+1^2 a2g ... a1)^2"""
    top = 2 * genus + 1
    half = list(range(1, top + 1)) + [top] + list(range(top - 1, 0, -1))
    return chain_letters(half, genus).power(2)


def chain_word(genus: int) -> TwistWord:
    """(a1 ... a2g+1)^(2g+2)"""
    return chain_letters(range(1, 2 * genus + 2), genus).power(2 * genus + 2)


def k3_monodromy() -> TwistWord:
    """(a1 a2 a3 a4 a5^2)^5 in genus 2"""
    return chain_letters([1, 2, 3, 4, 5, 5], 2).power(5)


# ═══════════════════════════════════════════════════════════════════════════════
# DERIVATION FILES
# ═══════════════════════════════════════════════════════════════════════════════

DERIVATION_GRAMMAR = r"""
start: _NL? genus_line start_line move_line* end_line block_line*

genus_line: "genus" INT _NL
start_line: "start" word _NL
move_line: MOVE INT LETTER? _NL
end_line: "end" word _NL
block_line: "block" word _NL

word: (LETTER | IDENTITY)+

MOVE: "HR" | "HL" | "BRAID" | "COMM" | "INS" | "CANCEL"
LETTER: /a\d+(\^-?\d+)?/
IDENTITY: "1"
COMMENT: /#[^\n]*/
_NL: /(\r?\n[\t ]*(#[^\n]*)?)+/

%import common.INT
%ignore /[ \t]+/
%ignore COMMENT
"""

_derivation_parser = Lark(DERIVATION_GRAMMAR, parser='lalr', propagate_positions=True)


@dataclass(frozen=True)
class Derivation:
    genus: int
    start: TwistWord
    moves: Tuple[Move, ...]
    end: TwistWord
    blocks: Tuple[TwistWord, ...] = ()
    name: str = ''


@v_args(inline=True)
class _DerivationBuilder(Transformer):
    def genus_line(self, value):
        return 'genus', int(value)

    def start_line(self, word):
        return 'start', word

    def end_line(self, word):
        return 'end', word

    def block_line(self, word):
        return 'block', word

    def move_line(self, kind, position, letter=None):
        letters = parse_letters(str(letter)) if letter is not None else None
        if letters is not None and len(letters) != 1:
            raise MoveError(str(letter), int(position), "INS inserts a single letter")
        return 'move', Move(str(kind), int(position), letters[0] if letters else None)

    def word(self, *tokens):
        return ' '.join(str(t) for t in tokens)

    def start(self, *lines):
        return list(lines)


def parse_derivation(text: str, name: str = '') -> Derivation:
    if not text.endswith('\n'):
        text += '\n'
    try:
        lines = _DerivationBuilder().transform(_derivation_parser.parse(text))
    except UnexpectedInput as err:
        raise DerivationFormatError(f"unexpected input in derivation {name or '<text>'}",
                                    err.line, err.column) from err
    except VisitError as err:
        raise DerivationFormatError(str(err.orig_exc)) from err

    genus = lines[0][1]
    try:
        start = TwistWord.parse(lines[1][1], genus)
        moves = tuple(value for tag, value in lines if tag == 'move')
        end = next(TwistWord.parse(value, genus) for tag, value in lines if tag == 'end')
        blocks = tuple(TwistWord.parse(value, genus) for tag, value in lines if tag == 'block')
    except MoveError as err:
        raise DerivationFormatError(f"derivation {name or '<text>'}: {err}") from err
    return Derivation(genus, start, moves, end, blocks, name)


def load_derivation(path) -> Derivation:
    path = Path(path)
    if not path.exists() and not path.is_absolute():
        candidate = config.DERIVATIONS_DIR / path
        if candidate.exists():
            path = candidate
        elif candidate.with_suffix('.deriv').exists():
            path = candidate.with_suffix('.deriv')
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as err:
        raise DerivationFormatError(f"cannot read derivation {path}: {err.strerror}") from err
    return parse_derivation(text, path.stem)


def verify_derivation(derivation: Derivation, homology: Optional[ChainHomology] = None) -> Dict[str, Any]:
    """Replay every move from the start word and compare with the end word."""
    homology = homology or standard_chain(derivation.genus)
    word = derivation.start
    for step, move in enumerate(derivation.moves, 1):
        try:
            word = apply_move(word, move)
        except MoveError as e:
            logger.debug("derivation %s stopped at step %d: %s", derivation.name, step, e)
            return {
                'success': False,
                'failing_step': step,
                'error': str(e),
                'word': word,
                'matrix_preserved': None,
                'blocks_match': None,
                'blocks': [],
            }
        logger.debug("step %d %s -> %s", step, move, word)

    reached = word.letters == derivation.end.letters
    if not reached and word.free_reduce().letters == derivation.end.free_reduce().letters:
        reached = True
    matrix_preserved = bool(np.array_equal(
        word_to_matrix(derivation.start, homology), word_to_matrix(derivation.end, homology)))

    blocks_match = None
    if derivation.blocks:
        joined = tuple(x for block in derivation.blocks for x in block.letters)
        blocks_match = joined == derivation.end.letters

    return {
        'success': reached and matrix_preserved and blocks_match is not False,
        'failing_step': None if reached else len(derivation.moves),
        'error': None if reached else f"replay ends at '{word}', expected '{derivation.end}'",
        'word': word,
        'matrix_preserved': matrix_preserved,
        'blocks_match': blocks_match,
        'blocks': [classify_block(block, homology) for block in derivation.blocks],
    }
