"""
Certificates for exotic structures.

Symbolic K.w pairings against a general symplectic class w = a h - sum b_i e_i,
their restriction to a plumbing, exact positivity on the symplectic cone, and
bookkeeping of Seiberg-Witten basic classes under blow-up and rational blowdown.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import sympy
from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput

from surgery import config
from surgery.blowdown import PlumbingEmbedding, descent_check, dual_pairings, restricted_square
from surgery.errors import InvariantError, LatticeError, SurgeryError
from surgery.lattice import BLOWUP, DivisorClass, IntersectionLattice, ManifoldInvariants, lift

logger = logging.getLogger(__name__)

_SYMBOL = re.compile(r"([a-z]+)(\d*)$")


def _symbol_key(symbol: str) -> Tuple[str, int]:
    match = _SYMBOL.match(symbol)
    if not match:
        return symbol, 0
    return match.group(1), int(match.group(2) or 0)


@dataclass(frozen=True)
class SymbolicLinearForm:
    symbols: Tuple[str, ...]
    coefficients: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.symbols) != len(self.coefficients):
            raise SurgeryError("form needs one coefficient per symbol")
        object.__setattr__(self, 'coefficients', tuple(Fraction(c) for c in self.coefficients))

    @classmethod
    def zero(cls, symbols: Sequence[str]) -> "SymbolicLinearForm":
        return cls(tuple(symbols), (Fraction(0),) * len(symbols))

    @classmethod
    def symbol(cls, symbols: Sequence[str], name: str) -> "SymbolicLinearForm":
        return cls(tuple(symbols), tuple(Fraction(int(s == name)) for s in symbols))

    def _check(self, other: "SymbolicLinearForm") -> None:
        if other.symbols != self.symbols:
            raise SurgeryError(f"forms over different symbols: {self.symbols} vs {other.symbols}")

    def __add__(self, other: "SymbolicLinearForm") -> "SymbolicLinearForm":
        self._check(other)
        return SymbolicLinearForm(self.symbols, tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "SymbolicLinearForm") -> "SymbolicLinearForm":
        self._check(other)
        return SymbolicLinearForm(self.symbols, tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self) -> "SymbolicLinearForm":
        return SymbolicLinearForm(self.symbols, tuple(-a for a in self.coefficients))

    def __mul__(self, factor) -> "SymbolicLinearForm":
        if not isinstance(factor, (int, Fraction)):
            return NotImplemented
        return SymbolicLinearForm(self.symbols, tuple(factor * a for a in self.coefficients))

    __rmul__ = __mul__

    def coefficient(self, symbol: str) -> Fraction:
        return self.coefficients[self.symbols.index(symbol)]

    @property
    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def evaluate(self, values: Mapping[str, Fraction]) -> Fraction:
        try:
            return sum((c * Fraction(values[s]) for s, c in zip(self.symbols, self.coefficients) if c),
                       Fraction(0))
        except KeyError as e:
            raise SurgeryError(f"no value for symbol {e.args[0]}") from None

    def to_sympy(self):
        return sum(sympy.Rational(c.numerator, c.denominator) * sympy.Symbol(s)
                   for s, c in zip(self.symbols, self.coefficients))

    @property
    def denominator(self) -> int:
        return lcm(*(c.denominator for c in self.coefficients)) if self.coefficients else 1

    def format(self, denominator: Optional[int] = None) -> str:
        """'(517a-319b1-99b2)/121' over the given or least common denominator."""
        scale = denominator or self.denominator
        numerators = []
        for symbol, c in zip(self.symbols, self.coefficients):
            value = c * scale
            if value.denominator != 1:
                raise SurgeryError(f"coefficient {c} of {symbol} is not a multiple of 1/{scale}")
            numerators.append(int(value))
        body = ''
        for symbol, n in zip(self.symbols, numerators):
            if n == 0:
                continue
            sign = '-' if n < 0 else '+'
            body += f"{sign}{'' if abs(n) == 1 else abs(n)}{symbol}"
        if not body:
            return '0'
        body = body[1:] if body[0] == '+' else body
        return body if scale == 1 else f"({body})/{scale}"

    def __str__(self) -> str:
        return self.format()


# ═══════════════════════════════════════════════════════════════════════════════
# SYMPLECTIC CLASS PAIRINGS
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class SymbolicClass:
    """A class whose coefficients are linear forms, w = a h - sum b_i e_i."""

    lattice: IntersectionLattice
    coefficients: Tuple[SymbolicLinearForm, ...]

    @property
    def symbols(self) -> Tuple[str, ...]:
        return self.coefficients[0].symbols


def symplectic_class(lattice: IntersectionLattice) -> SymbolicClass:
    if lattice.kind != BLOWUP:
        raise LatticeError(f"symplectic class a h - sum b_i e_i needs a blow-up lattice, got {lattice.label}")
    symbols = ('a',) + tuple(f"b{i}" for i in range(1, lattice.rank))
    coefficients = [SymbolicLinearForm.symbol(symbols, 'a')]
    coefficients += [-SymbolicLinearForm.symbol(symbols, s) for s in symbols[1:]]
    return SymbolicClass(lattice, tuple(coefficients))


def pair_symbolic(divisor: DivisorClass, w: SymbolicClass) -> SymbolicLinearForm:
    divisor = lift(divisor, w.lattice)
    result = SymbolicLinearForm.zero(w.symbols)
    gram = w.lattice.gram
    for i, d in enumerate(divisor.coefficients):
        if not d:
            continue
        for j, g in enumerate(gram[i]):
            if g:
                result = result + (d * g) * w.coefficients[j]
    return result


def restrict_and_pair(canonical: DivisorClass, w: SymbolicClass,
                      embedding: PlumbingEmbedding) -> SymbolicLinearForm:
    """kappa^T M^-1 omega with kappa_i = K.u_i and omega_i = w.u_i."""
    kappa = dual_pairings(canonical, embedding)
    omegas = [pair_symbolic(u, w) for u in embedding.vertices]
    inverse = embedding.chain.inverse()
    result = SymbolicLinearForm.zero(w.symbols)
    for i, k in enumerate(kappa):
        if not k:
            continue
        for j, form in enumerate(omegas):
            entry = inverse[i, j]
            if entry:
                result = result + (k * entry) * form
    return result


def exotic_functional(canonical: DivisorClass, w: SymbolicClass,
                      embedding: Optional[PlumbingEmbedding] = None) -> SymbolicLinearForm:
    """K.w on the complement of the plumbing: K.w - K|_P . w|_P"""
    total = pair_symbolic(canonical, w)
    if embedding is None:
        return total
    return total - restrict_and_pair(canonical, w, embedding)


# ═══════════════════════════════════════════════════════════════════════════════
# POSITIVITY ON THE SYMPLECTIC CONE
# ═══════════════════════════════════════════════════════════════════════════════

def cone_vertices(symbols: Sequence[str], k: int) -> List[Dict[str, Fraction]]:
    """Vertices of the a = 1 slice of {a > b1 > ... > bk > 0, a > sum b}: b1..bm = 1/m."""
    vertices = []
    for m in range(k + 1):
        point = {s: Fraction(0) for s in symbols}
        point['a'] = Fraction(1)
        for i in range(1, m + 1):
            point[f"b{i}"] = Fraction(1, m)
        vertices.append(point)
    return vertices


def _check_symbols(form: SymbolicLinearForm, k: int) -> None:
    allowed = {'a'} | {f"b{i}" for i in range(1, k + 1)}
    unknown = [s for s in form.symbols if s not in allowed]
    if unknown:
        raise SurgeryError(f"unknown symbols for the cone with k={k}: {', '.join(unknown)}")


def positivity_over_cone(form: SymbolicLinearForm, k: int) -> Dict[str, Any]:
    """Decide form > 0 on the open cone by its values at the closure's vertices."""
    _check_symbols(form, k)
    values = [form.evaluate(v) for v in cone_vertices(form.symbols, k)]
    minimum = min(values)
    positive = minimum >= 0 and not form.is_zero
    return {
        'success': positive,
        'positive': positive,
        'vertices': len(values),
        'values': values,
        'min_vertex': values.index(minimum),
        'min_value': minimum,
    }


def _descending_numerators(length: int, cap: int, budget: int) -> Iterator[Tuple[int, ...]]:
    """Non-increasing tuples n1 >= ... >= n_length >= 0 with n1 <= cap and sum <= budget."""
    if length == 0 or cap == 0 or budget == 0:
        yield (0,) * length
        return
    for n in range(min(cap, budget), -1, -1):
        for rest in _descending_numerators(length - 1, n, budget - n):
            yield (n,) + rest


def grid_points(k: int, max_denominator: int) -> List[Dict[str, Fraction]]:
    """Rational points of the closed slice a = 1 >= b1 >= ... >= bk >= 0, sum b <= 1 with denominator <= bound."""
    seen = {}
    for q in range(1, max_denominator + 1):
        for numerators in _descending_numerators(k, q, q):
            point = tuple(Fraction(n, q) for n in numerators)
            seen.setdefault(point, None)
    return [{'a': Fraction(1), **{f"b{i}": b for i, b in enumerate(point, 1)}} for point in seen]


def grid_oracle(form: SymbolicLinearForm, k: int, max_denominator: Optional[int] = None) -> Dict[str, Any]:
    """Evaluate the form on the slice's rational grid; the bound is raised to k so every corner is sampled."""
    _check_symbols(form, k)
    bound = max(max_denominator or config.GRID_DENOMINATOR, k)
    samples = grid_points(k, bound)
    values = [form.evaluate(p) for p in samples]
    negative = next((p for p, v in zip(samples, values) if v < 0), None)
    return {
        'positive': negative is None and any(v > 0 for v in values),
        'samples': len(samples),
        'witness': negative,
        'min_value': min(values),
    }


# ═══════════════════════════════════════════════════════════════════════════════
# REFERENCE FORMS
# ═══════════════════════════════════════════════════════════════════════════════

REFERENCE_GRAMMAR = r"""
?start: form

form: scale "(" term+ ")"   -> scaled
    | term+                 -> plain

scale: SIGN? INT "/" INT
term: SIGN? INT? target
target: SYMBOL                              -> single_target
      | "(" item ((","|"+") item)* ")"      -> group_target
item: SYMBOL ".." SYMBOL                    -> range_item
    | SYMBOL                                -> symbol_item

SIGN: "+" | "-" | "−"
SYMBOL: /[a-z]\d*/

%import common.INT
%import common.WS
%ignore WS
"""

_reference_parser = Lark(REFERENCE_GRAMMAR, parser='lalr')


@v_args(inline=True)
class _ReferenceBuilder(Transformer):
    def range_item(self, first, last):
        head, start = _symbol_key(str(first))
        tail, stop = _symbol_key(str(last))
        if head != tail or start > stop:
            raise SurgeryError(f"bad range {first}..{last}")
        return [f"{head}{i}" for i in range(start, stop + 1)]

    def symbol_item(self, symbol):
        return [str(symbol)]

    def single_target(self, symbol):
        return [str(symbol)]

    def group_target(self, *items):
        return [s for item in items for s in item]

    def term(self, *parts):
        sign, size = 1, 1
        for part in parts[:-1]:
            if part.type == 'SIGN':
                sign = -1 if str(part) in ('-', '−') else 1
            else:
                size = int(part)
        return sign * size, parts[-1]

    def scale(self, *parts):
        sign = -1 if len(parts) == 3 and str(parts[0]) in ('-', '−') else 1
        return Fraction(sign * int(parts[-2]), int(parts[-1]))

    def scaled(self, factor, *terms):
        return factor, list(terms)

    def plain(self, *terms):
        return Fraction(1), list(terms)


def parse_reference_form(text: str, symbols: Optional[Sequence[str]] = None) -> SymbolicLinearForm:
    """Read '1/121 (517a -319b1 -88(b4..b13) -99(b2..b17))'; overlapping ranges add up."""
    try:
        factor, terms = _ReferenceBuilder().transform(_reference_parser.parse(text))
    except UnexpectedInput as err:
        raise SurgeryError(f"cannot read reference form at column {err.column}: {text}") from err
    totals: Dict[str, Fraction] = {}
    for coefficient, targets in terms:
        for symbol in targets:
            totals[symbol] = totals.get(symbol, Fraction(0)) + factor * coefficient
    ordered = tuple(symbols) if symbols else tuple(sorted(totals, key=_symbol_key))
    missing = [s for s in totals if s not in ordered]
    if missing:
        raise SurgeryError(f"reference form uses symbols outside {ordered}: {', '.join(missing)}")
    return SymbolicLinearForm(ordered, tuple(totals.get(s, Fraction(0)) for s in ordered))


def compare_forms(computed: SymbolicLinearForm, reference: SymbolicLinearForm) -> List[str]:
    """Symbols whose coefficients differ."""
    symbols = list(computed.symbols) + [s for s in reference.symbols if s not in computed.symbols]

    def value(form: SymbolicLinearForm, symbol: str) -> Fraction:
        return form.coefficient(symbol) if symbol in form.symbols else Fraction(0)

    return [s for s in symbols if value(computed, s) != value(reference, s)]


# ═══════════════════════════════════════════════════════════════════════════════
# SEIBERG-WITTEN BASIC CLASSES
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class BasicClassSet:
    """Basic classes with their SW values; descended sets remember the plumbings removed."""

    lattice: Optional[IntersectionLattice]
    classes: Tuple[DivisorClass, ...] = ()
    values: Tuple[int, ...] = ()
    embeddings: Tuple[PlumbingEmbedding, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.classes)

    def value(self, cls: DivisorClass) -> int:
        return self.values[self.classes.index(cls)]

    def descended_square(self, cls: DivisorClass) -> Fraction:
        """Square of the class on the complement of every removed plumbing."""
        square = Fraction(cls.square)
        for embedding in self.embeddings:
            square -= restricted_square(cls, embedding)
        return square

    def lifted(self, lattice: IntersectionLattice) -> "BasicClassSet":
        return BasicClassSet(lattice, tuple(lift(c, lattice) for c in self.classes), self.values, self.embeddings)


def zero_set(lattice: IntersectionLattice) -> BasicClassSet:
    """K3-type set: the single basic class 0 with value 1."""
    return BasicClassSet(lattice, (lattice.zero(),), (1,))


def taubes(canonical: DivisorClass, invariants: ManifoldInvariants) -> BasicClassSet:
    """+-K for a symplectic manifold with b2+ > 1."""
    if invariants.b2_plus <= 1:
        raise InvariantError(f"Taubes' basic classes need b2+ > 1, got {invariants.b2_plus}")
    sign = (-1) ** ((invariants.e + invariants.sigma) // 4)
    if canonical.is_zero:
        return BasicClassSet(canonical.lattice, (canonical,), (1,))
    return BasicClassSet(canonical.lattice, (canonical, -canonical), (1, sign))


def standard_set(invariants: ManifoldInvariants) -> BasicClassSet:
    """m CP^2 # n CP^2-bar with m >= 2 has vanishing Seiberg-Witten function."""
    if invariants.b2_plus < 2:
        raise InvariantError("standard set is only defined for b2+ >= 2")
    return BasicClassSet(None)


def blowup(basic: BasicClassSet, exceptional: DivisorClass) -> BasicClassSet:
    """L -> L + e, L - e with the same values."""
    lifted = basic.lifted(exceptional.lattice)
    if exceptional.square != -1 or any(c.pair(exceptional) for c in lifted.classes):
        raise LatticeError(f"{exceptional} is not a fresh exceptional class")
    classes: List[DivisorClass] = []
    values: List[int] = []
    for cls, value in zip(lifted.classes, lifted.values):
        for sign in (1, -1):
            classes.append(cls + sign * exceptional)
            values.append(value)
    return BasicClassSet(exceptional.lattice, tuple(classes), tuple(values), lifted.embeddings)


def descend(basic: BasicClassSet, embedding: PlumbingEmbedding) -> BasicClassSet:
    """Keep the classes that extend over the rational ball replacing the plumbing."""
    kept = [(c, v) for c, v in zip(basic.classes, basic.values) if descent_check(c, embedding)['success']]
    logger.debug("descent keeps %d of %d basic classes", len(kept), len(basic.classes))
    return BasicClassSet(
        basic.lattice,
        tuple(c for c, _ in kept),
        tuple(v for _, v in kept),
        basic.embeddings + (embedding,),
    )


def minimality(basic: BasicClassSet) -> Dict[str, Any]:
    """Minimal unless two basic classes differ by a class of square -4."""
    for first, second in combinations(basic.classes, 2):
        if basic.descended_square(first - second) == -4:
            return {'success': False, 'minimal': False, 'pair': (first, second)}
    return {'success': True, 'minimal': True, 'pair': None}


def exotic_verdict(label: Optional[str], positivity: Optional[Mapping[str, Any]]) -> str:
    """Homeomorphism label plus a positive K.w certificate against the standard target."""
    if label and positivity and positivity.get('positive'):
        return config.VERDICT_EXOTIC
    return config.VERDICT_INCONCLUSIVE
