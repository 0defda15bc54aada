"""
Plan execution: each statement drives one library operation and writes its
results into an ordered report.
"""

import logging
from collections import Counter
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from surgery import config
from surgery.blowdown import PlumbingChain, PlumbingEmbedding, blowdown_invariants, descent_check, plumbing_chain
from surgery.certify import (
    BasicClassSet,
    SymbolicLinearForm,
    blowup as blowup_basic,
    compare_forms,
    descend,
    exotic_verdict,
    grid_oracle,
    minimality,
    pair_symbolic,
    parse_reference_form,
    positivity_over_cone,
    restrict_and_pair,
    standard_set,
    symplectic_class,
    taubes,
    zero_set,
)
from surgery.errors import (
    EmbeddingError,
    InvariantError,
    LedgerError,
    PlanAssertionError,
    PlanSyntaxError,
    SurgeryError,
)
from surgery.hirzebruch import FibrationInvariants, RuledModel, basis_map, fibration_totals
from surgery.lattice import (
    ABSTRACT,
    BLOWUP,
    RULED,
    DivisorClass,
    IntersectionLattice,
    ManifoldInvariants,
    abstract_lattice,
    blow_up_invariants,
    blow_up_times,
    blowup_lattice,
    homeo_type,
    invariants_of,
    lift,
    resolve,
)
from surgery.mcg import load_derivation, verify_derivation
from surgery.pencilscript import PencilLedger, finalize, ix_presets, verify_relation
from surgery.plan import BLOWDOWN_TAG, Expr, Statement, SurgeryPlan, load_plan
from surgery.report import Report

logger = logging.getLogger(__name__)


class PlanRunner:
    """Single-use executor holding the state a plan builds up line by line."""

    def __init__(self, name: str = ''):
        self.report = Report(name)
        self.counters: Counter = Counter()
        self._reset(None)

    def _reset(self, lattice: Optional[IntersectionLattice]) -> None:
        self.lattice = lattice
        self.ruled: Optional[int] = None
        self.classes: Dict[str, DivisorClass] = {}
        self.user_classes: List[str] = []
        self.invariants: Optional[ManifoldInvariants] = None
        self.ledger: Optional[PencilLedger] = None
        self.chain: Optional[PlumbingChain] = None
        self.vertices: Dict[int, DivisorClass] = {}
        self.embedding: Optional[PlumbingEmbedding] = None
        self.label: Optional[str] = None
        self.functional: Optional[SymbolicLinearForm] = None
        self.basic: Optional[BasicClassSet] = None
        self.justification: Optional[str] = None

    def run(self, plan: SurgeryPlan) -> Report:
        for st in plan:
            logger.debug("line %s: %s %s", st.line, st.kind, st.args)
            try:
                getattr(self, f"_run_{st.kind}")(st)
            except SurgeryError as e:
                raise e.at(st.line, st.column)
        return self.report

    # ═══════════════════════════════════════════════════════════════════════
    # HELPERS
    # ═══════════════════════════════════════════════════════════════════════

    def _current(self) -> IntersectionLattice:
        if self.lattice is None:
            raise SurgeryError("no surface declared")
        return self.lattice

    def _named(self, name: str) -> DivisorClass:
        lattice = self._current()
        if name in self.classes:
            return lift(self.classes[name], lattice)
        return lattice.generator(name)

    def _expr(self, expr: Expr) -> DivisorClass:
        result = self._current().zero()
        for coefficient, name in expr:
            result = result + coefficient * self._named(name)
        return result

    def _rebuild(self, gram=None, canonical=None) -> None:
        """Swap in an abstract lattice with edited Gram or canonical, rebinding every class."""
        old = self._current()
        if old.kind != ABSTRACT:
            raise SurgeryError(f"Gram entries can only be declared on an abstract surface, not {old.label}")
        if canonical is None:
            canonical = old.canonical_coefficients
        new = abstract_lattice(old.generators, gram if gram is not None else old.gram, canonical)
        self.classes = {
            name: DivisorClass(new, lift(cls, old).coefficients) for name, cls in self.classes.items()
        }
        self.lattice = new

    def _ambient(self) -> ManifoldInvariants:
        if self.invariants is not None:
            return self.invariants
        lattice = self._current()
        if lattice.kind in (BLOWUP, RULED):
            return invariants_of(lattice)
        raise InvariantError("declare 'invariants euler .. signature ..' for an abstract surface")

    def _label(self, invariants: ManifoldInvariants) -> Optional[str]:
        if self.justification is None:
            return None
        return homeo_type(replace(invariants, simply_connected=True, justification=self.justification))

    def _next(self, counter: str) -> int:
        self.counters[counter] += 1
        return self.counters[counter]

    # ═══════════════════════════════════════════════════════════════════════
    # SURFACES AND CLASSES
    # ═══════════════════════════════════════════════════════════════════════

    def _run_surface(self, st: Statement) -> None:
        kind, value = st.args
        if kind == 'blowup':
            self._reset(blowup_lattice(value))
        elif kind == 'ruled':
            model = RuledModel(value)
            self._reset(model.lattice)
            self.ruled = value
            self.classes['C0'] = model.c0
        else:
            size = len(value)
            self._reset(abstract_lattice(value, [[0] * size for _ in range(size)]))
        self.report.set('surface', self.lattice.label)

    def _run_square(self, st: Statement) -> None:
        name, value = st.args
        lattice = self._current()
        gram = [list(row) for row in lattice.gram]
        i = lattice.index(name)
        gram[i][i] = value
        self._rebuild(gram)

    def _run_meet(self, st: Statement) -> None:
        first, second, value = st.args
        lattice = self._current()
        if first == second:
            raise SurgeryError(f"use 'square {first} = ..' for a self-intersection")
        gram = [list(row) for row in lattice.gram]
        i, j = lattice.index(first), lattice.index(second)
        gram[i][j] = gram[j][i] = value
        self._rebuild(gram)

    def _run_canonical(self, st: Statement) -> None:
        expr = st.args[0]
        if expr is None:
            self._rebuild(canonical=[0] * self._current().rank)
        else:
            self._rebuild(canonical=self._expr(expr).coefficients)

    def _run_invariants(self, st: Statement) -> None:
        e, sigma = st.args
        self.invariants = ManifoldInvariants(e, sigma)
        self.report.set('invariants.e', e)
        self.report.set('invariants.sigma', sigma)

    def _run_convert(self, st: Statement) -> None:
        if self.ruled is None:
            raise SurgeryError("convert needs a ruled surface")
        mapping = basis_map(self.ruled)
        self.classes = {name: mapping(cls) for name, cls in self.classes.items()}
        model = RuledModel(self.ruled)
        self.classes.update({
            'Cinf': mapping(model.cinf),
            'F': mapping(model.fiber),
            'C0': mapping(model.c0),
        })
        self.lattice = mapping.target
        self.ruled = None
        self.report.set('surface', self.lattice.label)
        self.report.set('convert.defect', mapping.canonical_defect())
        for name in self.user_classes:
            self.report.set(f"class.{name}", self.classes[name])

    def _run_class(self, st: Statement) -> None:
        name, expr = st.args
        cls = self._expr(expr)
        self.classes[name] = cls
        if name not in self.user_classes:
            self.user_classes.append(name)
        self.report.set(f"class.{name}", cls)
        self.report.set(f"class.{name}.square", cls.square)

    def _run_blowup(self, st: Statement) -> None:
        if self.ledger is not None:
            raise LedgerError(f"finalize ledger {self.ledger.name} before blowing up")
        count = st.args[0]
        self.lattice = blow_up_times(self._current(), count)
        if self.invariants is not None:
            for _ in range(count):
                self.invariants = blow_up_invariants(self.invariants)
        self.report.set('surface', self.lattice.label)

    def _run_resolve(self, st: Statement) -> None:
        name, parts = st.args
        classes = [self._named(value) if tag == 'name' else self._expr(value) for tag, value in parts]
        resolution = resolve(classes)
        self.classes[name] = resolution.cls
        prefix = f"resolve.{name}"
        self.report.set(prefix, resolution.cls)
        self.report.set(f"{prefix}.square", resolution.square)
        self.report.set(f"{prefix}.contacts", resolution.total_contacts)
        if resolution.genus is not None:
            self.report.set(f"{prefix}.genus", resolution.genus)

    def _run_relation(self, st: Statement) -> None:
        lhs, rhs = st.args
        result = verify_relation(self._current(), self._expr(lhs), self._expr(rhs))
        prefix = f"relation.{self._next('relation')}"
        self.report.set(f"{prefix}.consistent", result['consistent'])
        self.report.set(f"{prefix}.witness", result['witness'])
        self.report.set(f"{prefix}.parity_obstruction", result['parity_obstruction'])
        self.report.set(f"{prefix}.squares_match", result['squares_match'])

    # ═══════════════════════════════════════════════════════════════════════
    # LEDGERS AND CONFIGURATIONS
    # ═══════════════════════════════════════════════════════════════════════

    def _run_ledger(self, st: Statement) -> None:
        name, base = st.args
        self.ledger = PencilLedger(self._named(base), name=name)
        self.report.set(f"ledger.{name}.base", self.ledger.base)

    def _open_ledger(self) -> PencilLedger:
        if self.ledger is None:
            raise LedgerError("no open ledger")
        return self.ledger

    def _run_component(self, st: Statement) -> None:
        name, multiplicity = st.args
        self._open_ledger().add_component(name, self._named(name), multiplicity)

    def _run_step(self, st: Statement) -> None:
        drops, name, exceptional, multiplicity = st.args
        ledger = self._open_ledger()
        identified = None if exceptional is None else self._expr(exceptional)
        ledger.step(dict(drops), multiplicity, identified, name)
        self.lattice = ledger.lattice

    def _run_finalize(self, st: Statement) -> None:
        ledger = self._open_ledger()
        configuration = finalize(ledger)
        fiber_name = st.args[0]
        self.lattice = ledger.lattice
        self.classes[fiber_name] = configuration.fiber_class
        self.ledger = None

        prefix = f"ledger.{ledger.name}"
        self.report.set(f"{prefix}.steps", configuration.steps)
        self.report.set(f"{prefix}.components", len(configuration.components))
        self.report.set(f"{prefix}.fiber", configuration.fiber_class)
        self.report.set(f"{prefix}.fiber_square", configuration.fiber_class.square)
        self.report.set(f"{prefix}.genus", ledger.genus)
        self.report.set(f"{prefix}.multiplicities", configuration.multiplicities)
        self.report.set(f"{prefix}.squares", configuration.squares)
        self.report.set(f"{prefix}.dual_graph", configuration.dual_graph)
        self.report.set(f"{prefix}.warnings", len(configuration.warnings))

    def _run_block(self, st: Statement) -> None:
        kind = st.args[0]
        block = ix_presets()[kind]
        prefix = f"block.{kind}"
        kernel = block.kernel()
        self.report.set(f"{prefix}.components", block.components)
        self.report.set(f"{prefix}.rank", block.rank)
        self.report.set(f"{prefix}.negative_semidefinite", block.negative_semidefinite)
        self.report.set(f"{prefix}.kernel", list(kernel[0]) if kernel else None)
        if kind == 'ix2':
            self.report.set(f"{prefix}.resolved_square", block.resolve(['F', 'G']).square)

    def _run_fibration(self, st: Statement) -> None:
        kf2, chi, genus, base = st.args
        totals = fibration_totals(
            FibrationInvariants(kf2, chi, genus, base),
            simply_connected=self.justification is not None,
            justification=self.justification or '',
        )
        prefix = f"fibration.{self._next('fibration')}"
        for key in ('c1sq', 'chiO', 'e', 'sigma', 'e_f', 'noether'):
            self.report.set(f"{prefix}.{key}", totals[key])
        if totals['label'] is not None:
            self.report.set(f"{prefix}.label", totals['label'])

    # ═══════════════════════════════════════════════════════════════════════
    # RATIONAL BLOWDOWN
    # ═══════════════════════════════════════════════════════════════════════

    def _run_plumbing(self, st: Statement) -> None:
        p, q = st.args
        self.chain = plumbing_chain(p, q)
        self.vertices = {}
        self.embedding = None
        prefix = f"plumbing.{p}.{q}"
        self.report.set(f"{prefix}.weights", list(self.chain.weights))
        self.report.set(f"{prefix}.length", self.chain.length)
        self.report.set(f"{prefix}.determinant", self.chain.determinant)
        self.report.set(f"{prefix}.boundary", self.chain.lens_label)
        self.report.set(f"{prefix}.inverse_column1", list(self.chain.inverse()[:, 0]))

    def _run_embed(self, st: Statement) -> None:
        if self.chain is None:
            raise EmbeddingError("embed needs a plumbing")
        index, expr = st.args
        if index > self.chain.length:
            raise EmbeddingError(f"u{index} is beyond the chain of length {self.chain.length}")
        self.vertices[index] = self._expr(expr)

    def _run_blowdown(self, st: Statement) -> None:
        tag = st.args[0] if st.args else BLOWDOWN_TAG
        if self.chain is None:
            raise EmbeddingError("blowdown needs a plumbing")
        missing = [f"u{i}" for i in range(1, self.chain.length + 1) if i not in self.vertices]
        if missing:
            raise EmbeddingError(f"vertices not embedded: {', '.join(missing)}")
        lattice = self._current()
        vertices = tuple(lift(self.vertices[i], lattice) for i in range(1, self.chain.length + 1))
        embedding = PlumbingEmbedding(self.chain, vertices).validate()
        descent = descent_check(lattice.canonical(), embedding)
        result = blowdown_invariants(self._ambient(), self.chain.length)
        label = self._label(result)
        logger.debug("blowdown %s: e=%d sigma=%d label=%s", tag, result.e, result.sigma, label)

        self.embedding = embedding
        self.invariants = result
        self.label = label

        self.report.set(f"{tag}.embedding", True)
        self.report.set(f"{tag}.descent.pairings", descent['pairings'])
        self.report.set(f"{tag}.descent.pairings_match", descent['pairings_match'])
        self.report.set(f"{tag}.descent.restricted_square", descent['restricted_square'])
        self.report.set(f"{tag}.descent.square_match", descent['square_match'])
        self.report.set(f"{tag}.e", result.e)
        self.report.set(f"{tag}.sigma", result.sigma)
        self.report.set(f"{tag}.b2plus", result.b2_plus)
        self.report.set(f"{tag}.b2minus", result.b2_minus)
        self.report.set(f"{tag}.c1sq", result.c1sq)
        if label is not None:
            self.report.set(f"{tag}.label", label)

    # ═══════════════════════════════════════════════════════════════════════
    # CERTIFICATES
    # ═══════════════════════════════════════════════════════════════════════

    def _run_certify(self, st: Statement) -> None:
        if self.embedding is None:
            raise EmbeddingError("certify needs a blowdown first")
        lattice = self._current()
        w = symplectic_class(lattice)
        canonical = lattice.canonical()
        denominator = self.chain.p ** 2
        kw = pair_symbolic(canonical, w)
        restricted = restrict_and_pair(canonical, w, self.embedding)
        self.functional = kw - restricted

        k = lattice.rank - 1
        positivity = positivity_over_cone(self.functional, k)
        grid = grid_oracle(self.functional, k)
        verdict = exotic_verdict(self.label, positivity)

        self.report.set('certify.kw', kw.format())
        self.report.set('certify.restricted', restricted.format(denominator))
        self.report.set('certify.functional', self.functional.format(denominator))
        self.report.set('certify.positive', positivity['positive'])
        self.report.set('certify.vertices', positivity['vertices'])
        self.report.set('certify.min_vertex', positivity['min_vertex'])
        self.report.set('certify.min_value', positivity['min_value'])
        self.report.set('certify.grid_positive', grid['positive'])
        self.report.set('certify.verdict', verdict)

    def _run_expect(self, st: Statement) -> None:
        if self.functional is None:
            raise SurgeryError("expect functional needs a certify first")
        reference = parse_reference_form(st.args[0], self.functional.symbols)
        mismatch = compare_forms(self.functional, reference)
        if mismatch:
            logger.warning("reference form differs on %s", ', '.join(mismatch))
        self.report.set('certify.reference.match', not mismatch)
        self.report.set('certify.reference.mismatch', mismatch)

    def _run_claim(self, st: Statement) -> None:
        tag, label = st.args
        observed = self.report.get(f"{tag}.label")
        if observed != label:
            logger.warning("claim %s: published %s, computed %s", tag, label, observed)
        self.report.set(f"{tag}.claimed", label)
        self.report.set(f"{tag}.claim_match", observed == label)

    def _run_basic(self, st: Statement) -> None:
        operation, argument = st.args
        prefix = f"basic.{self._next('basic')}"
        if operation == 'minimal':
            result = minimality(self._basic())
            self.report.set(f"{prefix}.minimal", result['minimal'])
            self.report.set(f"{prefix}.pair", list(result['pair']) if result['pair'] else None)
            return

        if operation == 'zero':
            self.basic = zero_set(self._current())
        elif operation == 'taubes':
            self.basic = taubes(self._current().canonical(), self._ambient())
        elif operation == 'blowup':
            self.basic = blowup_basic(self._basic(), self._named(argument))
        elif operation == 'descend':
            if self.embedding is None:
                raise EmbeddingError("basic descend needs a blowdown first")
            self.basic = descend(self._basic().lifted(self._current()), self.embedding)
        elif operation == 'standard':
            self.basic = standard_set(self._ambient())
        self.report.set(f"{prefix}.{operation}", list(self.basic.classes))

    def _basic(self) -> BasicClassSet:
        if self.basic is None:
            raise SurgeryError("no basic-class set; start with 'basic zero' or 'basic taubes'")
        return self.basic

    def _run_derivation(self, st: Statement) -> None:
        name = st.args[0]
        derivation = load_derivation(name)
        result = verify_derivation(derivation)
        prefix = f"derivation.{name}"
        self.report.set(f"{prefix}.ok", result['success'])
        self.report.set(f"{prefix}.moves", len(derivation.moves))
        if result['failing_step'] is not None:
            self.report.set(f"{prefix}.failing_step", result['failing_step'])
        self.report.set(f"{prefix}.blocks", len(result['blocks']))
        for i, block in enumerate(result['blocks'], 1):
            self.report.set(f"{prefix}.block{i}", block['label'])

    # ═══════════════════════════════════════════════════════════════════════
    # ASSUMPTIONS AND ASSERTIONS
    # ═══════════════════════════════════════════════════════════════════════

    def _run_assume(self, st: Statement) -> None:
        self.justification = st.args[0]
        self.report.set('assume.sc', self.justification)

    def _run_assert(self, st: Statement) -> None:
        key, expected = st.args
        observed = self.report.text(key) if key in self.report else None
        if observed != expected:
            raise PlanAssertionError(key, expected, observed, st.line, st.column)

    def _run_report(self, st: Statement) -> None:
        logger.debug("report marker at line %s with %d entries", st.line, len(self.report))


def run(plan: SurgeryPlan) -> Report:
    return PlanRunner(plan.name).run(plan)


# ═══════════════════════════════════════════════════════════════════════════════
# CASE PRESETS
# ═══════════════════════════════════════════════════════════════════════════════

def case_names() -> List[str]:
    return sorted(config.CASES)


def case_path(name: str) -> Path:
    key = name.replace('-', '_')
    if key not in config.CASES:
        raise PlanSyntaxError(config.MESSAGES['case_unknown'].format(name=name, available=', '.join(case_names())))
    return config.PRESETS_DIR / config.CASES[key]


def run_case(name: str) -> Tuple[SurgeryPlan, Report]:
    plan = load_plan(case_path(name))
    return plan, run(plan)
