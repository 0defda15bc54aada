"""
Integer homology lattices of blown-up surfaces.

A lattice is a list of generator names with a symmetric integer Gram matrix and
an optional canonical class. Divisor classes are integer vectors over those
generators; every pairing is exact integer arithmetic.
"""

import logging
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from surgery.errors import InvariantError, LabelError, LatticeError

logger = logging.getLogger(__name__)

BLOWUP = 'blowup'
RULED = 'ruled'
ABSTRACT = 'abstract'

_MONOMIAL = re.compile(r"\s*([+-])?\s*(\d*)\s*([A-Za-z_][A-Za-z0-9_']*)\s*")
_EXCEPTIONAL = re.compile(r"e(\d+)$")


def format_monomials(coefficients: Sequence[int], names: Sequence[str]) -> str:
    """Render a coefficient vector as a signed monomial string such as 4h-2e1-e2."""
    text = ''
    for coefficient, name in zip(coefficients, names):
        if coefficient == 0:
            continue
        sign = '-' if coefficient < 0 else '+'
        size = abs(coefficient)
        text += f"{sign}{'' if size == 1 else size}{name}"
    if not text:
        return '0'
    return text[1:] if text[0] == '+' else text


@dataclass(frozen=True)
class IntersectionLattice:
    kind: str
    generators: Tuple[str, ...]
    gram: Tuple[Tuple[int, ...], ...]
    canonical_coefficients: Optional[Tuple[int, ...]] = None
    degree: Optional[int] = None

    def __post_init__(self):
        size = len(self.generators)
        if self.kind not in (BLOWUP, RULED, ABSTRACT):
            raise LatticeError(f"unknown lattice kind '{self.kind}'")
        if len(set(self.generators)) != size:
            raise LatticeError(f"duplicate generator names in {self.generators}")
        if len(self.gram) != size or any(len(row) != size for row in self.gram):
            raise LatticeError(f"gram must be {size}x{size}")
        for i in range(size):
            for j in range(i + 1, size):
                if self.gram[i][j] != self.gram[j][i]:
                    raise LatticeError(
                        f"gram is not symmetric at ({self.generators[i]}, {self.generators[j]})")
        if self.canonical_coefficients is not None and len(self.canonical_coefficients) != size:
            raise LatticeError("canonical class has the wrong number of coefficients")

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def label(self) -> str:
        if self.kind == ABSTRACT:
            return f"abstract({self.rank})"
        return f"{self.kind}({self.degree})"

    def index(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise LatticeError(f"unknown generator '{name}' in {self.label}") from None

    def generator(self, name: str) -> "DivisorClass":
        coefficients = [0] * self.rank
        coefficients[self.index(name)] = 1
        return DivisorClass(self, tuple(coefficients))

    def zero(self) -> "DivisorClass":
        return DivisorClass(self, (0,) * self.rank)

    @property
    def has_canonical(self) -> bool:
        return self.canonical_coefficients is not None

    def canonical(self) -> "DivisorClass":
        if self.canonical_coefficients is None:
            raise LatticeError(f"{self.label} has no canonical class")
        return DivisorClass(self, self.canonical_coefficients)

    def matrix(self) -> np.ndarray:
        return np.array(self.gram, dtype=object)

    def combination(self, terms: Iterable[Tuple[int, str]]) -> "DivisorClass":
        """Class from (coefficient, generator) pairs."""
        coefficients = [0] * self.rank
        for coefficient, name in terms:
            coefficients[self.index(name)] += coefficient
        return DivisorClass(self, tuple(coefficients))

    def parse(self, text: str) -> "DivisorClass":
        """Parse a monomial string like '8h -4e1 -2e2' over this lattice's generators."""
        text = text.strip()
        if text == '0':
            return self.zero()
        terms = []
        position = 0
        while position < len(text):
            match = _MONOMIAL.match(text, position)
            if not match or match.end() == position:
                raise LatticeError(f"cannot parse class '{text}' at offset {position}")
            if terms and match.group(1) is None:
                raise LatticeError(f"missing sign before '{match.group(3)}' in '{text}'")
            sign = -1 if match.group(1) == '-' else 1
            size = int(match.group(2)) if match.group(2) else 1
            terms.append((sign * size, match.group(3)))
            position = match.end()
        return self.combination(terms)


@dataclass(frozen=True)
class DivisorClass:
    lattice: IntersectionLattice
    coefficients: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coefficients) != self.lattice.rank:
            raise LatticeError(
                f"class has {len(self.coefficients)} coefficients, lattice has {self.lattice.rank}")

    def _same(self, other: "DivisorClass") -> None:
        if not isinstance(other, DivisorClass):
            raise LatticeError(f"expected a divisor class, got {other!r}")
        if other.lattice != self.lattice:
            raise LatticeError(
                f"classes live in different lattices: {self.lattice.label} vs {other.lattice.label}")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._same(other)
        return DivisorClass(self.lattice, tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._same(other)
        return DivisorClass(self.lattice, tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.lattice, tuple(-a for a in self.coefficients))

    def __mul__(self, factor: int) -> "DivisorClass":
        if not isinstance(factor, int):
            return NotImplemented
        return DivisorClass(self.lattice, tuple(factor * a for a in self.coefficients))

    __rmul__ = __mul__

    def pair(self, other: "DivisorClass") -> int:
        return pair(self, other)

    @property
    def square(self) -> int:
        return pair(self, self)

    def coefficient(self, name: str) -> int:
        return self.coefficients[self.lattice.index(name)]

    @property
    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def __str__(self) -> str:
        return format_monomials(self.coefficients, self.lattice.generators)


# ═══════════════════════════════════════════════════════════════════════════════
# LATTICE CONSTRUCTORS
# ═══════════════════════════════════════════════════════════════════════════════

@lru_cache(maxsize=None)
def blowup_lattice(k: int) -> IntersectionLattice:
    """CP² blown up k times: h, e1..ek with gram diag(1, -1, ..., -1)."""
    if k < 0:
        raise LatticeError(f"blow-up count must be non-negative, got {k}")
    size = k + 1
    gram = tuple(
        tuple((1 if i == 0 else -1) if i == j else 0 for j in range(size))
        for i in range(size)
    )
    generators = ('h',) + tuple(f"e{i}" for i in range(1, size))
    canonical = (-3,) + (1,) * k
    return IntersectionLattice(BLOWUP, generators, gram, canonical, k)


@lru_cache(maxsize=None)
def ruled_lattice(n: int) -> IntersectionLattice:
    """Hirzebruch surface F_n on the section Cinf and the fiber F."""
    if n < 0:
        raise LatticeError(f"Hirzebruch degree must be non-negative, got {n}")
    return IntersectionLattice(RULED, ('Cinf', 'F'), ((n, 1), (1, 0)), (-2, n - 2), n)


def abstract_lattice(generators: Sequence[str], gram: Sequence[Sequence[int]],
                     canonical: Optional[Sequence[int]] = None) -> IntersectionLattice:
    return IntersectionLattice(
        ABSTRACT,
        tuple(generators),
        tuple(tuple(int(x) for x in row) for row in gram),
        None if canonical is None else tuple(int(x) for x in canonical),
    )


# ═══════════════════════════════════════════════════════════════════════════════
# PAIRING, ADJUNCTION, BLOW-UP
# ═══════════════════════════════════════════════════════════════════════════════

def pair(x: DivisorClass, y: DivisorClass) -> int:
    """x^T . gram . y"""
    x._same(y)
    gram = x.lattice.gram
    total = 0
    for i, a in enumerate(x.coefficients):
        if a == 0:
            continue
        row = gram[i]
        total += a * sum(g * b for g, b in zip(row, y.coefficients) if b)
    return total


def adjunction_genus(divisor: DivisorClass) -> Fraction:
    """(K.D + D.D)/2 + 1"""
    canonical = divisor.lattice.canonical()
    return Fraction(pair(canonical, divisor) + pair(divisor, divisor), 2) + 1


def _next_exceptional(lattice: IntersectionLattice) -> str:
    used = [int(m.group(1)) for m in map(_EXCEPTIONAL.match, lattice.generators) if m]
    return f"e{max(used, default=0) + 1}"


@lru_cache(maxsize=None)
def blow_up(lattice: IntersectionLattice) -> IntersectionLattice:
    """Append one exceptional generator of square -1; the canonical class gains it."""
    if lattice.kind == BLOWUP:
        return blowup_lattice(lattice.degree + 1)
    if lattice.kind == RULED:
        raise LatticeError("convert a ruled lattice to a blow-up basis before blowing up")
    name = _next_exceptional(lattice)
    gram = [list(row) + [0] for row in lattice.gram]
    gram.append([0] * lattice.rank + [-1])
    canonical = None
    if lattice.canonical_coefficients is not None:
        canonical = lattice.canonical_coefficients + (1,)
    return abstract_lattice(lattice.generators + (name,), gram, canonical)


def blow_up_times(lattice: IntersectionLattice, count: int) -> IntersectionLattice:
    for _ in range(count):
        lattice = blow_up(lattice)
    return lattice


def lift(divisor: DivisorClass, target: IntersectionLattice) -> DivisorClass:
    """The same class in a lattice that extends its own by extra generators."""
    source = divisor.lattice
    if source == target:
        return divisor
    size = source.rank
    if target.generators[:size] != source.generators or any(
            target.gram[i][:size] != source.gram[i] for i in range(size)):
        raise LatticeError(f"{target.label} does not extend {source.label}")
    return DivisorClass(target, divisor.coefficients + (0,) * (target.rank - size))


def proper_transform(divisor: DivisorClass, multiplicity: int) -> DivisorClass:
    """D - m e_new in the lattice blown up once more."""
    target = blow_up(divisor.lattice)
    exceptional = target.generator(target.generators[-1])
    return lift(divisor, target) - multiplicity * exceptional


@dataclass(frozen=True)
class Resolution:
    cls: DivisorClass
    parts: Tuple[DivisorClass, ...]
    contacts: Tuple[Tuple[int, int, int], ...]

    @property
    def square(self) -> int:
        return self.cls.square

    @property
    def total_contacts(self) -> int:
        return sum(count for _, _, count in self.contacts)

    @property
    def genus(self) -> Optional[Fraction]:
        if not self.cls.lattice.has_canonical:
            return None
        return adjunction_genus(self.cls)


def resolve(classes: Sequence[DivisorClass]) -> Resolution:
    """Symplectic resolution: the sum class plus the pairwise intersections it consumes."""
    if len(classes) < 2:
        raise LatticeError("resolution needs at least two classes")
    total = classes[0]
    for other in classes[1:]:
        total = total + other
    contacts = tuple(
        (i, j, pair(classes[i], classes[j]))
        for i in range(len(classes)) for j in range(i + 1, len(classes))
    )
    logger.debug("resolved %d classes into %s (square %d)", len(classes), total, total.square)
    return Resolution(total, tuple(classes), contacts)


# ═══════════════════════════════════════════════════════════════════════════════
# GRAM ORACLES
# ═══════════════════════════════════════════════════════════════════════════════

def determinant(lattice: IntersectionLattice) -> int:
    return int(sympy.Matrix(lattice.gram).det())


def gram_rank(lattice: IntersectionLattice) -> int:
    return int(sympy.Matrix(lattice.gram).rank())


def signature(lattice: IntersectionLattice) -> int:
    eigenvalues = np.linalg.eigvalsh(np.array(lattice.gram, dtype=float))
    return int(np.sum(eigenvalues > 1e-9) - np.sum(eigenvalues < -1e-9))


def is_negative_semidefinite(lattice: IntersectionLattice) -> bool:
    eigenvalues = np.linalg.eigvalsh(np.array(lattice.gram, dtype=float))
    return bool(np.all(eigenvalues < 1e-9))


def radical(lattice: IntersectionLattice) -> List[Tuple[int, ...]]:
    """Primitive integer basis of the kernel of the Gram matrix."""
    basis = []
    for vector in sympy.Matrix(lattice.gram).nullspace():
        denominators = [sympy.fraction(sympy.nsimplify(x))[1] for x in vector]
        scale = sympy.ilcm(*denominators) if denominators else 1
        entries = [int(x * scale) for x in vector]
        common = int(sympy.igcd(*entries)) or 1
        entries = [x // common for x in entries]
        if sum(entries) < 0:
            entries = [-x for x in entries]
        basis.append(tuple(entries))
    return basis


# ═══════════════════════════════════════════════════════════════════════════════
# MANIFOLD INVARIANTS
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class ManifoldInvariants:
    e: int
    sigma: int
    b1: int = 0
    parity: str = 'odd'
    simply_connected: bool = False
    justification: str = ''

    def __post_init__(self):
        if self.parity not in ('odd', 'even'):
            raise InvariantError(f"parity must be odd or even, got {self.parity}")
        b2 = self.b2
        if b2 < 0 or (b2 + self.sigma) % 2 or b2 + self.sigma < 0 or b2 - self.sigma < 0:
            raise InvariantError(
                f"(e={self.e}, sigma={self.sigma}, b1={self.b1}) gives no valid b2+/b2-")

    @property
    def b2(self) -> int:
        return self.e - 2 + 2 * self.b1

    @property
    def b2_plus(self) -> int:
        return (self.b2 + self.sigma) // 2

    @property
    def b2_minus(self) -> int:
        return (self.b2 - self.sigma) // 2

    @property
    def c1sq(self) -> int:
        return c1sq(self)

    def assume_simply_connected(self, justification: str) -> "ManifoldInvariants":
        return replace(self, simply_connected=True, justification=justification)


def c1sq(invariants: ManifoldInvariants) -> int:
    return 3 * invariants.sigma + 2 * invariants.e


def connected_sum(first: ManifoldInvariants, second: ManifoldInvariants) -> ManifoldInvariants:
    reasons = [r for r in (first.justification, second.justification) if r]
    return ManifoldInvariants(
        e=first.e + second.e - 2,
        sigma=first.sigma + second.sigma,
        b1=first.b1 + second.b1,
        parity='odd' if 'odd' in (first.parity, second.parity) else 'even',
        simply_connected=first.simply_connected and second.simply_connected,
        justification='; '.join(reasons),
    )


def blow_up_invariants(invariants: ManifoldInvariants) -> ManifoldInvariants:
    return replace(invariants, e=invariants.e + 1, sigma=invariants.sigma - 1, parity='odd')


def homeo_type(invariants: ManifoldInvariants) -> str:
    """Freedman label m CP² # n CP̄² for odd simply connected manifolds."""
    if not invariants.simply_connected:
        raise LabelError("homeomorphism label needs the simply connected assumption")
    if invariants.parity != 'odd':
        raise LabelError("only the odd (non-spin) case is labelled")
    if invariants.b1 != 0:
        raise LabelError(f"b1 = {invariants.b1}; only b1 = 0 is labelled")
    plus, minus = invariants.b2_plus, invariants.b2_minus
    if plus == 0 and minus == 0:
        raise LabelError("odd intersection form needs b2 > 0")
    if plus == 0:
        return 'CP̄²' if minus == 1 else f"{minus}CP̄²"
    head = 'CP²' if plus == 1 else f"{plus}CP²"
    if minus == 0:
        return head
    return f"{head}#{minus}CP̄²"


def invariants_of(lattice: IntersectionLattice, simply_connected: bool = True,
                  justification: str = 'rational surface') -> ManifoldInvariants:
    """Invariants of the rational surface carried by a blow-up or ruled lattice."""
    if lattice.kind == BLOWUP:
        k = lattice.degree
        return ManifoldInvariants(3 + k, 1 - k, 0, 'odd', simply_connected, justification)
    if lattice.kind == RULED:
        parity = 'even' if lattice.degree % 2 == 0 else 'odd'
        return ManifoldInvariants(4, 0, 0, parity, simply_connected, justification)
    raise LatticeError("abstract lattices need declared invariants")


def classes_by_name(lattice: IntersectionLattice) -> Dict[str, DivisorClass]:
    return {name: lattice.generator(name) for name in lattice.generators}
