"""
Blow-up ledgers for pencils of curves and the fiber configurations they leave.

A ledger keeps two sides of a pencil: the A side as weighted components and
the B side as a single class. Every step blows up one base point, takes proper
transforms and may add the new exceptional curve to the A side; the two sides
must stay homologous throughout.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from surgery.errors import BalanceError, LatticeError, LedgerError
from surgery.lattice import (
    DivisorClass,
    IntersectionLattice,
    Resolution,
    abstract_lattice,
    adjunction_genus,
    blow_up,
    gram_rank,
    is_negative_semidefinite,
    lift,
    radical,
    resolve,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LedgerStep:
    exceptional: str
    cls: DivisorClass
    multiplicity: int
    drops: Tuple[Tuple[str, int], ...]
    identified: bool


class PencilLedger:
    """Single-owner builder; finalize() freezes it into a FiberConfiguration."""

    def __init__(self, base: DivisorClass, genus: int = 2, name: str = ''):
        self.name = name
        self.genus = genus
        self.lattice = base.lattice
        self.base = base
        self.components: List[Tuple[str, DivisorClass, int]] = []
        self.steps: List[LedgerStep] = []

    def add_component(self, name: str, cls: DivisorClass, multiplicity: int) -> "PencilLedger":
        if multiplicity < 1:
            raise LedgerError(f"component {name} needs multiplicity >= 1, got {multiplicity}")
        if any(existing == name for existing, _, _ in self.components):
            raise LedgerError(f"component {name} is already on the A side")
        self.components.append((name, lift(cls, self.lattice), multiplicity))
        return self

    def total(self) -> DivisorClass:
        result = self.lattice.zero()
        for _, cls, multiplicity in self.components:
            result = result + multiplicity * cls
        return result

    def check_balance(self) -> bool:
        return self.total() == self.base

    def step(self, drops: Mapping[str, int], multiplicity: int,
             exceptional: Optional[DivisorClass] = None, name: Optional[str] = None) -> "PencilLedger":
        """Blow up one base point; on imbalance the ledger is left untouched."""
        known = {n for n, _, _ in self.components}
        for component in drops:
            if component not in known:
                raise LedgerError(f"step drops unknown component '{component}'")
        if multiplicity < 0:
            raise LedgerError(f"exceptional multiplicity must be >= 0, got {multiplicity}")

        if exceptional is None:
            lattice = blow_up(self.lattice)
            generator = lattice.generators[-1]
            if name is not None and name != generator:
                raise LedgerError(f"step names '{name}' but the next exceptional curve is '{generator}'")
            name = generator
            new = lattice.generator(generator)
            components = [(n, lift(c, lattice), m) for n, c, m in self.components]
            base = lift(self.base, lattice)
        else:
            lattice = self.lattice
            new = lift(exceptional, lattice)
            if new.square != -1:
                raise LedgerError(f"identified exceptional {new} has square {new.square}, not -1")
            if new.pair(self.base) != 0:
                raise LedgerError(f"identified exceptional {new} meets the pencil class")
            name = name or 'e'
            if name in known:
                raise LedgerError(f"component name '{name}' is already used")
            components = list(self.components)
            base = self.base

        components = [(n, c - drops.get(n, 0) * new, m) for n, c, m in components]
        if multiplicity:
            components.append((name, new, multiplicity))
        base = base - new

        total = lattice.zero()
        for _, cls, m in components:
            total = total + m * cls
        if total != base:
            raise BalanceError(total, base)

        self.lattice = lattice
        self.components = components
        self.base = base
        self.steps.append(LedgerStep(name, new, multiplicity, tuple(sorted(drops.items())),
                                     exceptional is not None))
        logger.debug("ledger %s step %d: %s x%d, B = %s", self.name, len(self.steps), new, multiplicity, base)
        return self


def ledger_step(ledger: PencilLedger, drops: Mapping[str, int], multiplicity: int,
                exceptional: Optional[DivisorClass] = None, name: Optional[str] = None) -> PencilLedger:
    return ledger.step(drops, multiplicity, exceptional, name)


# ═══════════════════════════════════════════════════════════════════════════════
# FIBER CONFIGURATIONS
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class FiberComponent:
    name: str
    cls: DivisorClass
    multiplicity: int
    square: int
    genus: int


def _is_tree(classes: Sequence[DivisorClass]) -> bool:
    size = len(classes)
    parent = list(range(size))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    edges = 0
    for i, j in combinations(range(size), 2):
        meet = classes[i].pair(classes[j])
        if meet < 0:
            return False
        edges += meet
        if meet:
            a, b = find(i), find(j)
            if a == b:
                return False
            parent[a] = b
    return edges == size - 1


@dataclass(frozen=True)
class FiberConfiguration:
    components: Tuple[FiberComponent, ...]
    fiber_class: DivisorClass
    steps: int
    warnings: Tuple[str, ...] = ()

    @property
    def multiplicities(self) -> List[int]:
        return [c.multiplicity for c in self.components]

    @property
    def squares(self) -> List[int]:
        return [c.square for c in self.components]

    @property
    def dual_graph(self) -> str:
        return 'tree' if _is_tree([c.cls for c in self.components]) else 'not-a-tree'


def finalize(ledger: PencilLedger) -> FiberConfiguration:
    if not ledger.check_balance():
        raise BalanceError(ledger.total(), ledger.base)
    fiber = ledger.base
    if fiber.square != 0:
        raise LedgerError(f"fiber class {fiber} has square {fiber.square}, not 0")
    genus = adjunction_genus(fiber)
    if genus != ledger.genus:
        raise LedgerError(f"fiber class {fiber} has genus {genus}, expected {ledger.genus}")

    components = []
    for name, cls, multiplicity in ledger.components:
        component_genus = adjunction_genus(cls)
        if component_genus != 0:
            raise LedgerError(f"component {name} = {cls} has genus {component_genus}, not 0")
        if cls.pair(fiber) != 0:
            raise LedgerError(f"component {name} = {cls} meets the fiber {cls.pair(fiber)} times")
        components.append(FiberComponent(name, cls, multiplicity, cls.square, int(component_genus)))

    configuration = FiberConfiguration(tuple(components), fiber, len(ledger.steps))
    warnings = []
    oval = -(ledger.genus + 1)
    ovals = configuration.squares.count(oval)
    if ovals != 1:
        warnings.append(f"expected one {oval} curve, found {ovals}")
    odd = [c.name for c in components if c.square not in (oval, -1, -2)]
    if odd:
        warnings.append(f"components outside the -1/-2 pattern: {', '.join(odd)}")
    if configuration.dual_graph != 'tree':
        warnings.append("dual graph is not a tree")
    for warning in warnings:
        logger.warning("ledger %s: %s", ledger.name, warning)
    return FiberConfiguration(configuration.components, fiber, len(ledger.steps), tuple(warnings))


# ═══════════════════════════════════════════════════════════════════════════════
# ABSTRACT CONFIGURATIONS
# ═══════════════════════════════════════════════════════════════════════════════

def verify_relation(lattice: IntersectionLattice, lhs: DivisorClass, rhs: DivisorClass) -> Dict[str, Any]:
    """Necessary condition for lhs = rhs: the difference pairs to zero with every generator."""
    difference = lhs - rhs
    witness = None
    for name in lattice.generators:
        if difference.pair(lattice.generator(name)) != 0:
            witness = name
            break
    return {
        'consistent': witness is None,
        'witness': witness,
        'defect': difference,
        'parity_obstruction': (lhs.square - rhs.square) % 2 != 0,
        'squares_match': lhs.square == rhs.square,
    }


def gram_from_incidences(generators: Sequence[str], squares: Mapping[str, int],
                         meets: Mapping[Tuple[str, str], int]) -> List[List[int]]:
    index = {name: i for i, name in enumerate(generators)}
    gram = [[0] * len(generators) for _ in generators]
    for name, value in squares.items():
        gram[index[name]][index[name]] = value
    for (first, second), value in meets.items():
        if first == second:
            raise LatticeError(f"use a square for {first}, not a meet")
        gram[index[first]][index[second]] = value
        gram[index[second]][index[first]] = value
    return gram


def k3_pencil_lattice(curve_square: int = -2) -> IntersectionLattice:
    """Curves E0, E1..E5, F1..F5, G1..G5 on the K3 double plane with a zero canonical class."""
    e = ['E0'] + [f"E{i}" for i in range(1, 6)]
    f = [f"F{i}" for i in range(1, 6)]
    g = [f"G{i}" for i in range(1, 6)]
    generators = e + f + g
    squares = {name: -2 for name in e}
    squares.update({name: curve_square for name in f + g})
    meets = {}
    for i in range(1, 6):
        meets[('E0', f"E{i}")] = 1
        meets[(f"F{i}", f"E{i}")] = 1
        meets[(f"G{i}", f"E{i}")] = 1
        meets[(f"F{i}", f"G{i}")] = 2
    for i, j in combinations(range(1, 6), 2):
        meets[(f"F{i}", f"F{j}")] = 1
        meets[(f"G{i}", f"G{j}")] = 1
    gram = gram_from_incidences(generators, squares, meets)
    return abstract_lattice(generators, gram, [0] * len(generators))


@dataclass(frozen=True)
class BlockConfiguration:
    name: str
    lattice: IntersectionLattice

    @property
    def components(self) -> int:
        return self.lattice.rank

    @property
    def rank(self) -> int:
        return gram_rank(self.lattice)

    @property
    def negative_semidefinite(self) -> bool:
        return is_negative_semidefinite(self.lattice)

    def kernel(self) -> List[Tuple[int, ...]]:
        return radical(self.lattice)

    def resolve(self, names: Sequence[str]) -> Resolution:
        return resolve([self.lattice.generator(n) for n in names])


def ix_presets(contact: int = 1) -> Dict[str, BlockConfiguration]:
    """The three-curve configuration {F, G, E} and the D7 configuration with F and G attached."""
    ix2 = abstract_lattice(
        ('F', 'G', 'E'),
        gram_from_incidences(('F', 'G', 'E'), {'F': -3, 'G': -3, 'E': -2},
                             {('F', 'G'): contact, ('F', 'E'): 1, ('G', 'E'): 1}),
    )
    names = [f"E{i}" for i in range(1, 8)] + ['F', 'G']
    squares = {name: -2 for name in names}
    squares.update({'F': -3, 'G': -3})
    meets = {('E1', 'E2'): 1, ('E2', 'E3'): 1, ('E3', 'E4'): 1, ('E4', 'E5'): 1,
             ('E5', 'E6'): 1, ('E5', 'E7'): 1, ('F', 'E6'): 1, ('G', 'E7'): 1}
    ix4 = abstract_lattice(names, gram_from_incidences(names, squares, meets))
    return {'ix2': BlockConfiguration('ix2', ix2), 'ix4': BlockConfiguration('ix4', ix4)}
