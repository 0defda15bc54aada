"""
Hirzebruch surfaces F_n, their blow-up bases, pencils of hyperelliptic curves
and the numerical invariants of relatively minimal fibrations.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Optional, Tuple

from surgery.errors import LatticeError
from surgery.lattice import (
    DivisorClass,
    IntersectionLattice,
    ManifoldInvariants,
    adjunction_genus,
    blowup_lattice,
    homeo_type,
    ruled_lattice,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RuledModel:
    n: int
    lattice: IntersectionLattice = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'lattice', ruled_lattice(self.n))
        c0 = self.c0
        if c0.square != -self.n or c0.pair(self.cinf) != 0:
            raise LatticeError(f"C0 of F_{self.n} fails C0^2 = -n, C0.Cinf = 0")

    @property
    def cinf(self) -> DivisorClass:
        return self.lattice.generator('Cinf')

    @property
    def fiber(self) -> DivisorClass:
        return self.lattice.generator('F')

    @property
    def c0(self) -> DivisorClass:
        return self.cinf - self.n * self.fiber

    def divisor(self, a: int, b: int) -> DivisorClass:
        """a C0 + b F"""
        return a * self.c0 + b * self.fiber

    def canonical(self) -> DivisorClass:
        return canonical(self.n)


def canonical(n: int) -> DivisorClass:
    """-2 Cinf + (n - 2) F"""
    return ruled_lattice(n).canonical()


# ═══════════════════════════════════════════════════════════════════════════════
# BLOW-UP BASES
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class BasisMap:
    """Linear map from a ruled lattice given by the images of Cinf and F."""

    source: IntersectionLattice
    target: IntersectionLattice
    images: Tuple[Tuple[str, DivisorClass], ...]

    def image(self, name: str) -> DivisorClass:
        for generator, cls in self.images:
            if generator == name:
                return cls
        raise LatticeError(f"no image for generator '{name}'")

    def __call__(self, divisor: DivisorClass) -> DivisorClass:
        if divisor.lattice != self.source:
            raise LatticeError(f"map is defined on {self.source.label}, got {divisor.lattice.label}")
        result = self.target.zero()
        for name, coefficient in zip(self.source.generators, divisor.coefficients):
            if coefficient:
                result = result + coefficient * self.image(name)
        return result

    def validate(self) -> "BasisMap":
        names = self.source.generators
        for i, first in enumerate(names):
            for second in names[i:]:
                before = self.source.generator(first).pair(self.source.generator(second))
                after = self.image(first).pair(self.image(second))
                if before != after:
                    raise LatticeError(
                        f"map does not preserve {first}.{second}: {before} became {after}")
        return self

    def canonical_defect(self) -> DivisorClass:
        """Image of the source canonical minus the target canonical."""
        return self(self.source.canonical()) - self.target.canonical()


@lru_cache(maxsize=None)
def basis_map(n: int) -> BasisMap:
    if n == 2:
        target = blowup_lattice(2)
        images = (('Cinf', target.parse('2h-e1-e2')), ('F', target.parse('h-e1')))
    elif n == 3:
        target = blowup_lattice(1)
        images = (('Cinf', target.parse('2h-e1')), ('F', target.parse('h-e1')))
    else:
        raise LatticeError(f"no built-in blow-up basis for F_{n}; only n = 2 and n = 3")
    return BasisMap(ruled_lattice(n), target, images).validate()


def to_blowup_basis(n: int, divisor: DivisorClass) -> DivisorClass:
    return basis_map(n)(divisor)


# ═══════════════════════════════════════════════════════════════════════════════
# AMPLENESS AND PENCILS
# ═══════════════════════════════════════════════════════════════════════════════

def ample_predicates(a: int, b: int, n: int) -> Dict[str, bool]:
    """Ampleness of a C0 + b F on F_n and whether |D| holds an irreducible curve."""
    very_ample = a > 0 and b > a * n
    irreducible = (
        (a == 0 and b == 1)
        or (a == 1 and b == 0)
        or very_ample
        or (n > 0 and a > 0 and b == a * n)
    )
    return {'very_ample': very_ample, 'irreducible_member': irreducible}


def pencil_stats(g: int, n: int) -> Dict[str, Any]:
    """Base points and adjunction genus of the pencil |2 Cinf + k F| with k = g + 1 - n."""
    k = g + 1 - n
    if k <= 0:
        raise LatticeError(f"k = g + 1 - n must be positive, got {k} for g={g}, n={n}")
    model = RuledModel(n)
    divisor = 2 * model.cinf + k * model.fiber
    genus = adjunction_genus(divisor)
    return {
        'k': k,
        'divisor': divisor,
        'base_points': divisor.square,
        'genus': genus,
        'genus_check': genus == g,
        'very_ample': ample_predicates(2, 2 * n + k, n)['very_ample'],
    }


def pencil_class(g: int, n: int) -> DivisorClass:
    """Pushed-forward fiber class 2 C0 + (g + n + 1) F of a genus g pencil on F_n."""
    if not 0 <= n <= g + 1:
        raise LatticeError(f"pencil on F_{n} needs 0 <= n <= g + 1 = {g + 1}")
    return RuledModel(n).divisor(2, g + n + 1)


def elimination_pencil(g: int) -> DivisorClass:
    return pencil_class(g, g)


# ═══════════════════════════════════════════════════════════════════════════════
# FIBRATION INVARIANTS
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class FibrationInvariants:
    Kf2: int
    chi_f: int
    g: int
    b: int
    q_f: int = 0
    e_f: Optional[int] = None
    fiber_euler: Tuple[int, ...] = ()


def fibration_totals(fi: FibrationInvariants, simply_connected: bool = False,
                     justification: str = '') -> Dict[str, Any]:
    correction = (fi.g - 1) * (fi.b - 1)
    c1sq = fi.Kf2 + 8 * correction
    chi = fi.chi_f + correction
    e = 12 * chi - c1sq
    sigma = c1sq - 8 * chi
    e_f = e - 4 * correction

    checks = []
    if fi.e_f is not None:
        checks.append(fi.e_f == e_f)
    if fi.fiber_euler:
        checks.append(sum(x - (2 - 2 * fi.g) for x in fi.fiber_euler) == e_f)

    label = None
    invariants = None
    if simply_connected:
        invariants = ManifoldInvariants(e, sigma, 0, 'odd', True, justification)
        label = homeo_type(invariants)
    logger.debug("fibration totals: c1^2=%d chi=%d e=%d sigma=%d", c1sq, chi, e, sigma)
    return {
        'c1sq': c1sq,
        'chiO': chi,
        'e': e,
        'sigma': sigma,
        'e_f': e_f,
        'q_f': fi.q_f,
        'noether': fi.Kf2 + e_f == 12 * fi.chi_f,
        'e_f_consistent': all(checks) if checks else None,
        'invariants': invariants,
        'label': label,
    }
