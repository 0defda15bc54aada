import logging
from fractions import Fraction

import pytest

from surgery import config
from surgery.errors import EmbeddingError, LedgerError, PlanAssertionError, PlanSyntaxError
from surgery.plan import parse
from surgery.report import load_kv, to_kv
from surgery.runner import case_names, case_path, run, run_case

LINE_BLOWDOWN = """\
surface blowup 5
plumbing 2 1
embed u1 = h -e1 -e2 -e3 -e4 -e5
assume sc "the complement of the line is simply connected"
blowdown p
certify
"""


def run_text(text):
    return run(parse(text, 'inline'))


class TestGolden:
    @pytest.mark.parametrize("name", case_names())
    def test_case_matches_golden(self, name):
        _, report = run_case(name)
        golden = config.GOLDEN_DIR / f"{name}.kv"
        assert report == load_kv(golden)
        assert to_kv(report) == golden.read_text(encoding='utf-8')

    def test_runs_are_deterministic(self):
        first = to_kv(run_case('viii_case2')[1])
        second = to_kv(run_case('viii_case2')[1])
        assert first == second

    def test_case_names_accept_dashes(self):
        assert case_path('viii-case1') == case_path('viii_case1')

    def test_unknown_case(self):
        with pytest.raises(PlanSyntaxError, match="Unknown case 'viii_case9'"):
            case_path('viii_case9')


class TestAcceptance:
    def test_first_seventeen_point_case(self):
        _, report = run_case('viii_case1')
        assert report['case1.label'] == 'CP²#7CP̄²'
        assert report['plumbing.11.1.determinant'] == 121
        assert report.text('certify.functional') == (
            '(517a-319b1-99b2-99b3-88b4-88b5-88b6-88b7-88b8-88b9-88b10-88b11-88b12-88b13'
            '-99b14-99b15-99b16-99b17)/121')
        assert report['certify.positive'] is True
        assert report['certify.verdict'] == config.VERDICT_EXOTIC

    def test_second_case_matches_reference_form(self):
        _, report = run_case('viii_case2')
        assert report['case2.label'] == 'CP²#6CP̄²'
        assert report['certify.reference.match'] is True
        assert report['certify.min_value'] == Fraction(1242, 529)

    def test_mixed_case_flags_the_published_label(self):
        _, report = run_case('ix_mixed')
        assert report['p6.label'] == '3CP²#18CP̄²'
        assert report['p6.claim_match'] is False

    def test_two_sphere_blocks(self):
        _, report = run_case('k3_pencil')
        assert report['derivation.two_nodal_split.block1'] == '2-nodal spherical'
        assert report['derivation.nodal_lefschetz_split.block3'] == 'lefschetz nodal'


class TestStatements:
    def test_single_sphere_blowdown(self):
        report = run_text(LINE_BLOWDOWN)
        assert report['p.descent.pairings'] == [2]
        assert report['p.descent.square_match'] is True
        assert (report['p.e'], report['p.sigma']) == (7, -3)
        assert report['p.label'] == 'CP²#4CP̄²'
        assert report['certify.functional'] == '(-10a+2b1+2b2+2b3+2b4+2b5)/4'
        assert report['certify.positive'] is False
        assert report['certify.verdict'] == config.VERDICT_INCONCLUSIVE

    def test_label_needs_assumption(self):
        report = run_text(LINE_BLOWDOWN.replace('assume sc "the complement of the line is simply connected"\n', ''))
        assert 'p.label' not in report
        assert report['certify.verdict'] == config.VERDICT_INCONCLUSIVE

    def test_bare_blowdown_reports_under_default_tag(self):
        report = run_text(LINE_BLOWDOWN.replace('blowdown p\n', 'blowdown\n'))
        assert (report['blowdown.e'], report['blowdown.sigma']) == (7, -3)
        assert report['blowdown.label'] == 'CP²#4CP̄²'

    def test_new_surface_forgets_the_assumption(self):
        text = ('surface blowup 2\nassume sc "rational surface"\n'
                + LINE_BLOWDOWN.replace('assume sc "the complement of the line is simply connected"\n', ''))
        report = run_text(text)
        assert report['assume.sc'] == 'rational surface'
        assert (report['p.e'], report['p.sigma']) == (7, -3)
        assert 'p.label' not in report

    def test_failed_assertion(self):
        with pytest.raises(PlanAssertionError) as info:
            run_text("surface blowup 1\nclass x = h -e1\nassert class.x.square 1\n")
        assert info.value.line == 3
        assert info.value.observed == '0'
        assert info.value.exit_code == 1

    def test_missing_vertex(self):
        with pytest.raises(EmbeddingError, match="u2") as info:
            run_text("surface blowup 17\nplumbing 11 1\nembed u1 = h\nblowdown c\n")
        assert info.value.line == 4

    def test_wrong_embedding(self):
        with pytest.raises(EmbeddingError, match="u1.u1"):
            run_text("surface blowup 3\nplumbing 2 1\nembed u1 = h -e1 -e2 -e3\nblowdown c\n")

    def test_blowup_inside_ledger(self):
        text = ("surface ruled 2\nclass B = 2C0 +5F\nconvert blowup\nledger p base B\n"
                "component F mult 5\ncomponent C0 mult 2\nblowup 1\n")
        with pytest.raises(LedgerError, match="finalize ledger p") as info:
            run_text(text)
        assert info.value.line == 7

    def test_abstract_gram_and_canonical(self):
        report = run_text(
            "surface abstract x y\nsquare x = -2\nsquare y = -2\nmeet x y = 1\n"
            "canonical zero\nresolve s = x + y\n")
        assert report['surface'] == 'abstract(2)'
        assert report['resolve.s.square'] == -2
        assert report['resolve.s.genus'] == 0

    def test_claim_mismatch_is_logged(self, caplog):
        with caplog.at_level(logging.WARNING, logger='surgery.runner'):
            report = run_text(LINE_BLOWDOWN + 'claim p "CP²#5CP̄²"\n')
        assert report['p.claim_match'] is False
        assert 'published CP²#5CP̄²' in caplog.text

    def test_basic_classes_through_blowdown(self):
        report = run_text(
            "surface abstract x e1\nsquare x = -2\nsquare e1 = -1\ncanonical = e1\n"
            "invariants euler 26 signature -18\nbasic zero\nbasic blowup e1\nbasic minimal\n")
        assert report.text('basic.2.blowup') == 'e1,-e1'
        assert report['basic.3.minimal'] is False
