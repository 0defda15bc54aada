import pytest

from surgery.errors import LatticeError
from surgery.hirzebruch import (
    FibrationInvariants, RuledModel, ample_predicates, basis_map, canonical,
    elimination_pencil, fibration_totals, pencil_class, pencil_stats, to_blowup_basis,
)
from surgery.lattice import adjunction_genus, blowup_lattice


class TestRuledModel:
    @pytest.mark.parametrize("n", [0, 1, 2, 3, 5])
    def test_negative_section(self, n):
        model = RuledModel(n)
        assert model.c0.square == -n
        assert model.c0.pair(model.cinf) == 0
        assert model.c0.pair(model.fiber) == 1

    def test_canonical(self):
        assert str(canonical(3)) == '-2Cinf+F'
        assert canonical(2).square == 8


class TestBasisMaps:
    def test_f2_images(self):
        mapping = basis_map(2)
        assert mapping.target == blowup_lattice(2)
        assert str(mapping.image('Cinf')) == '2h-e1-e2'
        assert str(mapping.image('F')) == 'h-e1'

    def test_f2_canonical_defect(self):
        assert str(basis_map(2).canonical_defect()) == '-h+e1+e2'

    def test_f3_preserves_canonical(self):
        assert basis_map(3).canonical_defect().is_zero

    def test_unknown_degree(self):
        with pytest.raises(LatticeError, match="only n = 2 and n = 3"):
            basis_map(4)

    def test_pencil_maps_to_plane_quintic(self):
        model = RuledModel(2)
        image = to_blowup_basis(2, model.divisor(2, 5))
        assert str(image) == '5h-3e1-2e2'
        assert image.square == model.divisor(2, 5).square == 12

    def test_wrong_source(self):
        with pytest.raises(LatticeError, match="defined on"):
            basis_map(2)(RuledModel(3).cinf)


class TestPencils:
    def test_genus_two_pencil(self):
        cls = pencil_class(2, 2)
        assert str(cls) == '2Cinf+F'
        assert adjunction_genus(cls) == 2

    def test_elimination_pencil(self):
        assert elimination_pencil(2) == pencil_class(2, 2)

    def test_pencil_range(self):
        with pytest.raises(LatticeError):
            pencil_class(2, 4)

    def test_stats(self):
        stats = pencil_stats(2, 2)
        assert stats['k'] == 1
        assert stats['base_points'] == 12
        assert stats['genus'] == 2
        assert stats['genus_check']
        assert stats['very_ample']

    def test_stats_need_positive_k(self):
        with pytest.raises(LatticeError, match="positive"):
            pencil_stats(1, 2)

    @pytest.mark.parametrize("a, b, n, very, irreducible", [
        (0, 1, 2, False, True),
        (1, 0, 2, False, True),
        (1, 2, 2, False, True),
        (2, 5, 2, True, True),
        (2, 3, 2, False, False),
    ])
    def test_ample_predicates(self, a, b, n, very, irreducible):
        result = ample_predicates(a, b, n)
        assert result == {'very_ample': very, 'irreducible_member': irreducible}


class TestFibrationTotals:
    def test_genus_two_over_sphere(self):
        totals = fibration_totals(FibrationInvariants(Kf2=4, chi_f=2, g=2, b=0),
                                  simply_connected=True, justification='section')
        assert (totals['c1sq'], totals['chiO'], totals['e'], totals['sigma']) == (-4, 1, 16, -12)
        assert totals['e_f'] == 20
        assert totals['noether']
        assert totals['label'] == 'CP²#13CP̄²'

    def test_without_assumption(self):
        totals = fibration_totals(FibrationInvariants(6, 3, 2, 0))
        assert (totals['e'], totals['sigma']) == (26, -18)
        assert totals['label'] is None
        assert totals['e_f_consistent'] is None

    def test_fiber_euler_check(self):
        # twenty nodal fibers of a genus 2 fibration
        fi = FibrationInvariants(4, 2, 2, 0, fiber_euler=(-1,) * 20)
        assert fibration_totals(fi)['e_f_consistent']
        bad = FibrationInvariants(4, 2, 2, 0, e_f=19)
        assert fibration_totals(bad)['e_f_consistent'] is False
