import pytest
from hypothesis import given
from hypothesis import strategies as st

from surgery import config
from surgery.errors import PlanArityError, PlanReferenceError, PlanSyntaxError
from surgery.plan import (
    BLOWDOWN_TAG, FIBER_NAME, SurgeryPlan, format_expr, format_plan, format_statement, load_plan, parse,
)
from tests.conftest import plan_statements

PRESETS = sorted(config.PRESETS_DIR.glob('*.plan'))

LEDGER = """\
surface ruled 2
class B = 2C0 +5F
convert blowup
ledger pencil base B
component F mult 5
component C0 mult 2
step F C0 -> e = h -e1 -e2 mult 6
step F e -> e3 mult 10
"""


class TestParse:
    def test_statements_and_positions(self):
        plan = parse("surface blowup 2\n\n# comment\nclass x = 2h -e1 -3e2\nreport\n")
        assert [s.kind for s in plan] == ['surface', 'class', 'report']
        assert plan.statements[0].args == ('blowup', 2)
        assert plan.statements[1].args == ('x', ((2, 'h'), (-1, 'e1'), (-3, 'e2')))
        assert plan.statements[1].line == 4

    def test_ledger_steps(self):
        plan = parse(LEDGER)
        first, second = plan.statements[-2:]
        assert first.args == ((('F', 1), ('C0', 1)), 'e', ((1, 'h'), (-1, 'e1'), (-1, 'e2')), 6)
        assert second.args == ((('F', 1), ('e', 1)), 'e3', None, 10)

    def test_resolve_parts(self):
        plan = parse("surface blowup 2\nresolve s = h + (h -e1) + e2\n")
        assert plan.statements[1].args == ('s', (('name', 'h'), ('expr', ((1, 'h'), (-1, 'e1'))), ('name', 'e2')))

    def test_keywords_as_names(self):
        plan = parse("surface abstract x e1\nsquare x = -2\nsquare e1 = -1\nbasic zero\nbasic blowup e1\n")
        assert plan.statements[-1].args == ('blowup', 'e1')

    def test_quoted_values(self):
        plan = parse('assume sc "a section is a sphere"\nassert case.label "CP²#7CP̄²"\nassert x.ok true\n')
        assert plan.statements[0].args == ('a section is a sphere',)
        assert plan.statements[1].args == ('case.label', 'CP²#7CP̄²')
        assert plan.statements[2].args == ('x.ok', 'true')

    def test_expect_keeps_rest_of_line(self):
        plan = parse("expect functional 1/121 (517a -319b1 -88(b4..b13))  # reference\n")
        assert plan.statements[0].args == ('1/121 (517a -319b1 -88(b4..b13))',)


class TestErrors:
    def test_syntax_error_line(self):
        with pytest.raises(PlanSyntaxError) as info:
            parse("surface blowup 1\nfrobnicate\n")
        assert info.value.line == 2
        assert info.value.exit_code == 2

    def test_bad_integer(self):
        with pytest.raises(PlanSyntaxError):
            parse("surface blowup two\n")

    def test_undefined_symbol(self):
        with pytest.raises(PlanReferenceError) as info:
            parse("surface blowup 2\nclass x = 2h +3q7\n")
        assert info.value.symbol == 'q7'
        assert info.value.line == 2

    def test_class_is_visible_after_definition(self):
        parse("surface blowup 1\nclass x = h -e1\nrelation x = h -e1\n")

    def test_blowup_adds_generators(self):
        parse("surface blowup 1\nblowup 2\nclass x = e3\n")
        with pytest.raises(PlanReferenceError, match="e3"):
            parse("surface blowup 1\nblowup 1\nclass x = e3\n")

    def test_step_outside_ledger(self):
        with pytest.raises(PlanReferenceError, match="outside an open ledger"):
            parse("surface blowup 1\nstep -> e2 mult 1\n")

    def test_step_must_name_next_exceptional(self):
        with pytest.raises(PlanReferenceError, match="next exceptional curve is 'e4'"):
            parse(LEDGER + "step e3 -> e5 mult 9\n")

    def test_step_drops_ledger_components_only(self):
        with pytest.raises(PlanReferenceError, match="not a component"):
            parse(LEDGER + "step h -> e4 mult 1\n")

    @pytest.mark.parametrize("text, message", [
        ("surface blowup 1\nresolve s = h\n", "two parts"),
        ("block ix9\n", "ix2, ix4"),
        ("basic blowup\n", "takes 1"),
        ("basic swap\n", "unknown basic-class"),
        ("surface blowup 1\nembed v1 = h\n", "u1, u2"),
        ("surface blowup 1\nconvert blowup\n", "ruled surface"),
    ])
    def test_arity(self, text, message):
        with pytest.raises(PlanArityError, match=message):
            parse(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(PlanSyntaxError, match="cannot read"):
            load_plan(tmp_path / 'absent.plan')


class TestFormat:
    @pytest.mark.parametrize("path", PRESETS, ids=lambda p: p.stem)
    def test_presets_round_trip(self, path):
        plan = load_plan(path)
        assert parse(format_plan(plan)) == plan

    def test_expr_signs(self):
        assert format_expr(((-2, 'h'), (1, 'e1'), (-1, 'e2'))) == '-2h +e1 -e2'

    @given(st.lists(
        st.tuples(st.integers(-5, 5).filter(bool), st.sampled_from(['h', 'e1', 'e2', 'e3'])),
        min_size=1, max_size=6))
    def test_expressions_round_trip(self, terms):
        expr = tuple(terms)
        plan = parse(f"surface blowup 3\nclass x = {format_expr(expr)}\n")
        assert plan.statements[1].args[1] == expr

    @given(st.lists(plan_statements, min_size=1, max_size=12))
    def test_random_plans_round_trip(self, statements):
        plan = SurgeryPlan(tuple(statements))
        assert parse(format_plan(plan), resolve_names=False) == plan


class TestOptionalNames:
    def test_bare_blowdown(self):
        plan = parse("surface blowup 17\nclass s = 8h -4e1 -2e2 -2e17\nplumbing 11 1\n"
                     "embed u1 = s\nblowdown\nreport\n")
        assert plan.statements[4].args == (BLOWDOWN_TAG,)
        assert format_statement(plan.statements[4]) == 'blowdown'
        assert format_statement(parse("surface blowup 1\nblowdown p1\n").statements[1]) == 'blowdown p1'

    def test_bare_finalize_binds_the_fiber(self):
        plan = parse(LEDGER + "finalize\nclass x = fiber -h\n")
        assert plan.statements[-2].args == (FIBER_NAME,)
        assert plan.statements[-1].args == ('x', ((1, 'fiber'), (-1, 'h')))
