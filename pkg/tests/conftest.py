"""
Shared strategies, oracles and fixtures
"""

from fractions import Fraction
from math import gcd

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from surgery.certify import SymbolicLinearForm
from surgery.lattice import DivisorClass, ManifoldInvariants, blowup_lattice
from surgery.mcg import TwistWord
from surgery.plan import BASIC_OPERATIONS, BLOCK_KINDS, Statement

settings.register_profile('surgery', max_examples=1000, derandomize=True, deadline=None)
settings.load_profile('surgery')


def cofactor_det(matrix):
    """Laplace expansion along the first row; slow but independent of numpy and sympy."""
    rows = [[Fraction(x) for x in row] for row in matrix]
    if len(rows) == 1:
        return rows[0][0]
    total = Fraction(0)
    for j, entry in enumerate(rows[0]):
        if entry == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        total += (-1) ** j * entry * cofactor_det(minor)
    return total


@st.composite
def blowup_classes(draw, k=None, count=1):
    """Classes on CP² # k CP̄² with small coefficients; several share one lattice."""
    size = draw(st.integers(min_value=0, max_value=6)) if k is None else k
    lattice = blowup_lattice(size)
    coefficients = st.lists(st.integers(min_value=-6, max_value=6), min_size=size + 1, max_size=size + 1)
    classes = [DivisorClass(lattice, tuple(draw(coefficients))) for _ in range(count)]
    return classes[0] if count == 1 else classes


@st.composite
def twist_words(draw, genus=2, max_size=8):
    top = 2 * genus + 1
    letter = st.tuples(st.integers(min_value=1, max_value=top), st.sampled_from([1, -1]))
    letters = draw(st.lists(letter, min_size=1, max_size=max_size))
    return TwistWord(genus, tuple(letters))


@st.composite
def chain_parameters(draw, max_p=25):
    p = draw(st.integers(min_value=2, max_value=max_p))
    q = draw(st.integers(min_value=1, max_value=p - 1).filter(lambda q: gcd(p, q) == 1))
    return p, q


@st.composite
def cone_forms(draw, max_k=6):
    """Integer linear forms in a, b1..bk; the a coefficient leans positive so both verdicts occur."""
    k = draw(st.integers(min_value=0, max_value=max_k))
    symbols = ('a',) + tuple(f"b{i}" for i in range(1, k + 1))
    head = draw(st.integers(min_value=-3, max_value=12))
    rest = draw(st.lists(st.integers(min_value=-8, max_value=8), min_size=k, max_size=k))
    return SymbolicLinearForm(symbols, tuple(Fraction(c) for c in [head] + rest))


@st.composite
def blowdown_inputs(draw):
    """Invariants with b1 = 0 and a plumbing length k <= b2-."""
    plus = draw(st.integers(min_value=0, max_value=12))
    minus = draw(st.integers(min_value=0, max_value=40))
    k = draw(st.integers(min_value=0, max_value=minus))
    return ManifoldInvariants(2 + plus + minus, plus - minus), k


# ═══════════════════════════════════════════════════════════════════════════════
# PLAN STATEMENTS
# ═══════════════════════════════════════════════════════════════════════════════

names = st.sampled_from(['h', 'e1', 'e12', 'F', 'C0', 'Bt', 'G1', "F'", 'x_1', 's'])
counts = st.integers(min_value=0, max_value=30)
signed = st.integers(min_value=-30, max_value=30)
exprs = st.lists(st.tuples(st.integers(-9, 9).filter(bool), names), min_size=1, max_size=4).map(tuple)
texts = st.sampled_from(['rational surface', 'a section meets S once', 'CP²#7CP̄²', 'quote " and \\ slash'])
parts = st.one_of(names.map(lambda n: ('name', n)), exprs.map(lambda e: ('expr', e)))


def _statement(kind, *args):
    return st.tuples(*args).map(lambda values: Statement(kind, values))


def _bare(kind):
    return st.just(Statement(kind))


plan_statements = st.one_of(
    _statement('surface', st.just('blowup'), counts),
    _statement('surface', st.just('ruled'), st.integers(min_value=0, max_value=5)),
    _statement('surface', st.just('abstract'), st.lists(names, min_size=1, max_size=4).map(tuple)),
    _statement('square', names, signed),
    _statement('meet', names, names, signed),
    _statement('canonical', st.one_of(st.none(), exprs)),
    _statement('invariants', signed, signed),
    _statement('convert', st.just('blowup')),
    _statement('class', names, exprs),
    _statement('blowup', counts),
    _statement('resolve', names, st.lists(parts, min_size=2, max_size=4).map(tuple)),
    _statement('relation', exprs, exprs),
    _statement('ledger', names, names),
    _statement('component', names, counts),
    _statement('step', st.lists(st.tuples(names, st.integers(1, 4)), max_size=3).map(tuple),
               names, st.one_of(st.none(), exprs), counts),
    _statement('finalize', names),
    _statement('block', st.sampled_from(BLOCK_KINDS)),
    _statement('fibration', signed, signed, counts, counts),
    _statement('plumbing', counts, counts),
    _statement('embed', st.integers(min_value=1, max_value=20), exprs),
    _statement('blowdown', st.sampled_from(['blowdown', 'p1', 'case1', 'c8a'])),
    _bare('certify'),
    _statement('expect', st.sampled_from(['1/121 (517a -319b1 -88(b4..b13))', '2a -b1'])),
    _statement('claim', names, texts),
    st.sampled_from(sorted(BASIC_OPERATIONS)).flatmap(
        lambda op: _statement('basic', st.just(op), names if BASIC_OPERATIONS[op] else st.none())),
    _statement('derivation', st.sampled_from(['two_nodal_split', 'chain_split_g3_odd'])),
    _statement('assume', texts),
    _statement('assert', st.sampled_from(['p1.e', 'class.x.square', 'certify.min_value']),
               st.sampled_from(['10', '-6', 'true', '198/121', 'CP²#7CP̄²', 'two words'])),
    _bare('report'),
)


@pytest.fixture
def blowup17():
    return blowup_lattice(17)
