from fractions import Fraction

import pytest
from hypothesis import given

from surgery import config
from surgery.blowdown import PlumbingEmbedding, plumbing_chain
from surgery.certify import (
    BasicClassSet, SymbolicLinearForm, blowup, compare_forms, cone_vertices, descend, exotic_functional,
    exotic_verdict, grid_oracle, grid_points, minimality, pair_symbolic, parse_reference_form,
    positivity_over_cone, restrict_and_pair, standard_set, symplectic_class, taubes, zero_set,
)
from surgery.errors import InvariantError, LatticeError, SurgeryError
from surgery.lattice import ManifoldInvariants, abstract_lattice, blow_up, blowup_lattice, ruled_lattice
from tests.conftest import cone_forms


def form(text, symbols=('a', 'b1', 'b2')):
    return parse_reference_form(text, symbols)


def line_embedding():
    lattice = blowup_lattice(5)
    line = lattice.parse('h-e1-e2-e3-e4-e5')
    return lattice, PlumbingEmbedding(plumbing_chain(2, 1), (line,)).validate()


class TestLinearForms:
    def test_format_over_denominator(self):
        f = SymbolicLinearForm(('a', 'b1'), (Fraction(1, 2), Fraction(-3, 4)))
        assert f.denominator == 4
        assert f.format() == '(2a-3b1)/4'
        assert f.format(8) == '(4a-6b1)/8'

    def test_format_rejects_coarse_denominator(self):
        f = SymbolicLinearForm(('a',), (Fraction(1, 3),))
        with pytest.raises(SurgeryError, match="not a multiple"):
            f.format(2)

    def test_integral_form_has_no_parentheses(self):
        assert str(form('2a - b1')) == '2a-b1'
        assert str(SymbolicLinearForm.zero(('a',))) == '0'

    def test_mixed_symbols(self):
        with pytest.raises(SurgeryError, match="different symbols"):
            form('a') + form('a', symbols=('a', 'b1'))


class TestPairing:
    def test_canonical_pairing(self):
        lattice = blowup_lattice(2)
        w = symplectic_class(lattice)
        assert w.symbols == ('a', 'b1', 'b2')
        assert str(pair_symbolic(lattice.canonical(), w)) == '-3a+b1+b2'
        assert str(pair_symbolic(lattice.parse('h-e1'), w)) == 'a-b1'

    def test_pairing_lifts_smaller_classes(self):
        w = symplectic_class(blowup_lattice(3))
        assert str(pair_symbolic(blowup_lattice(1).parse('e1'), w)) == 'b1'

    def test_needs_blowup_lattice(self):
        with pytest.raises(LatticeError, match="blow-up lattice"):
            symplectic_class(ruled_lattice(2))

    def test_restriction_to_single_sphere(self):
        lattice, embedding = line_embedding()
        w = symplectic_class(lattice)
        restricted = restrict_and_pair(lattice.canonical(), w, embedding)
        assert restricted.format(2) == '(-a+b1+b2+b3+b4+b5)/2'
        functional = exotic_functional(lattice.canonical(), w, embedding)
        assert functional.format(2) == '(-5a+b1+b2+b3+b4+b5)/2'

    def test_functional_without_plumbing_is_plain_pairing(self):
        lattice = blowup_lattice(1)
        w = symplectic_class(lattice)
        assert exotic_functional(lattice.canonical(), w) == pair_symbolic(lattice.canonical(), w)


class TestCone:
    def test_vertices(self):
        vertices = cone_vertices(('a', 'b1', 'b2'), 2)
        assert [(v['b1'], v['b2']) for v in vertices] == [
            (0, 0), (1, 0), (Fraction(1, 2), Fraction(1, 2))]
        assert all(v['a'] == 1 for v in vertices)

    def test_positive_on_boundary_zero(self):
        result = positivity_over_cone(form('a - b1', ('a', 'b1')), 1)
        assert result['positive']
        assert result['values'] == [1, 0]
        assert result['min_vertex'] == 1

    def test_negative_vertex(self):
        result = positivity_over_cone(form('b1 - a', ('a', 'b1')), 1)
        assert not result['positive']
        assert result['min_value'] == -1
        assert result['min_vertex'] == 0

    def test_zero_form_is_not_positive(self):
        assert not positivity_over_cone(SymbolicLinearForm.zero(('a', 'b1')), 1)['positive']

    def test_unknown_symbol(self):
        with pytest.raises(SurgeryError, match="unknown symbols"):
            positivity_over_cone(form('a - b2'), 1)

    def test_canonical_class_is_negative(self):
        lattice = blowup_lattice(4)
        kw = pair_symbolic(lattice.canonical(), symplectic_class(lattice))
        assert not positivity_over_cone(kw, 4)['positive']

    def test_grid_agrees_with_vertices(self):
        f = form('3a - 2b1 - b2')
        assert positivity_over_cone(f, 2)['positive'] == grid_oracle(f, 2)['positive']
        bad = grid_oracle(form('a - 2b1'), 2, max_denominator=4)
        assert not bad['positive']
        assert bad['witness'] is not None

    @given(cone_forms())
    def test_grid_and_vertices_agree_on_random_forms(self, f):
        k = len(f.symbols) - 1
        assert grid_oracle(f, k)['positive'] == positivity_over_cone(f, k)['positive']

    def test_grid_points_satisfy_the_slice_inequalities(self):
        points = grid_points(3, 4)
        for p in points:
            b = [p['b1'], p['b2'], p['b3']]
            assert p['a'] == 1
            assert 1 >= b[0] >= b[1] >= b[2] >= 0
            assert sum(b) <= 1
        assert len({tuple(sorted(p.items())) for p in points}) == len(points)
        assert {'a': 1, 'b1': Fraction(1, 3), 'b2': Fraction(1, 3), 'b3': Fraction(1, 3)} in points
        assert {'a': 1, 'b1': Fraction(1, 2), 'b2': Fraction(1, 4), 'b3': Fraction(1, 4)} in points

    def test_grid_bound_reaches_every_corner(self):
        f = form('2a - 7b3', ('a', 'b1', 'b2', 'b3'))
        assert positivity_over_cone(f, 3)['min_value'] == Fraction(-1, 3)
        result = grid_oracle(f, 3, max_denominator=2)
        assert not result['positive']
        assert result['witness'] == {'a': 1, 'b1': Fraction(1, 3), 'b2': Fraction(1, 3), 'b3': Fraction(1, 3)}


class TestReferenceForms:
    def test_overlapping_ranges_add(self):
        symbols = ('a',) + tuple(f"b{i}" for i in range(1, 18))
        f = parse_reference_form('1/121 (517a -319b1 -88(b4..b13) -99(b2..b17))', symbols)
        assert f.coefficient('a') == Fraction(517, 121)
        assert f.coefficient('b2') == Fraction(-99, 121)
        assert f.coefficient('b4') == Fraction(-187, 121)
        assert f.coefficient('b17') == Fraction(-99, 121)

    def test_symbols_sorted_numerically(self):
        f = parse_reference_form('b10 + b2 - (b3, b1)')
        assert f.symbols == ('b1', 'b2', 'b3', 'b10')
        assert f.coefficients == (-1, 1, -1, 1)

    def test_compare(self):
        assert compare_forms(form('a - b1'), form('a - b1 + b2')) == ['b2']
        assert compare_forms(form('a'), form('a')) == []

    def test_unreadable(self):
        with pytest.raises(SurgeryError, match="cannot read"):
            parse_reference_form('1/121 (517a')

    def test_symbol_outside_lattice(self):
        with pytest.raises(SurgeryError, match="outside"):
            parse_reference_form('a - b9', ('a', 'b1'))


class TestBasicClasses:
    def test_blowup_doubles_classes(self):
        base = abstract_lattice(['x'], [[-2]], [0])
        bigger = blow_up(base)
        result = blowup(zero_set(base), bigger.generator('e1'))
        assert [str(c) for c in result.classes] == ['e1', '-e1']
        assert result.values == (1, 1)
        assert not minimality(result)['minimal']

    def test_blowup_needs_fresh_exceptional(self):
        base = abstract_lattice(['x'], [[-2]], [0])
        with pytest.raises(LatticeError, match="fresh"):
            blowup(zero_set(base), base.generator('x'))

    def test_zero_set_is_minimal(self):
        result = minimality(zero_set(abstract_lattice(['x'], [[-2]], [0])))
        assert result['minimal']
        assert result['pair'] is None

    def test_taubes(self):
        lattice = blowup_lattice(5)
        classes = taubes(lattice.canonical(), ManifoldInvariants(26, -18))
        assert len(classes) == 2
        assert classes.value(-lattice.canonical()) == 1

    def test_taubes_needs_b2_plus(self):
        with pytest.raises(InvariantError, match="b2\\+ > 1"):
            taubes(blowup_lattice(5).canonical(), ManifoldInvariants(10, -6))

    def test_standard_set(self):
        assert len(standard_set(ManifoldInvariants(26, -18))) == 0
        with pytest.raises(InvariantError):
            standard_set(ManifoldInvariants(10, -6))

    def test_descent_keeps_characteristic_classes(self):
        lattice, embedding = line_embedding()
        canonical = lattice.canonical()
        basic = BasicClassSet(lattice, (canonical, -canonical, lattice.parse('h')), (1, 1, 1))
        kept = descend(basic, embedding)
        assert kept.classes == (canonical, -canonical)
        assert kept.descended_square(canonical) == 4 + 1


class TestVerdict:
    def test_exotic(self):
        assert exotic_verdict('CP²#7CP̄²', {'positive': True}) == config.VERDICT_EXOTIC

    @pytest.mark.parametrize("label, positivity", [
        (None, {'positive': True}),
        ('CP²#7CP̄²', {'positive': False}),
        ('CP²#7CP̄²', None),
    ])
    def test_inconclusive(self, label, positivity):
        assert exotic_verdict(label, positivity) == config.VERDICT_INCONCLUSIVE
