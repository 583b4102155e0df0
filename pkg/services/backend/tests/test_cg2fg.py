"""
Tests for the CG to FG translation and the semantic oracles built on it.
"""
import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from app.ifc.core.errors import CGTypeError, GenerationError
from app.ifc.core.values import BoolV, InlV
from app.ifc.fg import syntax as fg
from app.ifc.fg.evaluator import fg_eval
from app.ifc.harness.generators import gen_cg_program
from app.ifc.harness.oracles import equiv_check_cg2fg, equiv_check_fg2cg, inr_check_cg2fg
from app.ifc.surface.parser import parse
from app.ifc.surface.printer import pretty_fg_expr, pretty_fg_type
from app.ifc.translate.cg2fg import cg2fg_check, cg2fg_context, cg2fg_expr, cg2fg_type
from tests.conftest import corpus_cases


class TestTypeTranslation:
    """Tests for the CG to FG type map."""

    @pytest.mark.parametrize("source,expected", [
        ("bool", "bool@L"),
        ("(Labeled H bool)", "(bool@L + unit@L)@H"),
        ("(ref H bool)", "(ref (bool@L + unit@L)@H)@L"),
        ("(SLIO H L bool)", "(unit@L ->[H] (bool@L + unit@L)@L)@L"),
        ("(bool -> unit)", "(bool@L ->[H] unit@L)@L"),
    ])
    def test_type_map(self, two_point, cg_type, source, expected):
        assert pretty_fg_type(cg2fg_type(cg_type(source), two_point)) == expected

    def test_context_translation(self, two_point, cg_type):
        ctx = cg2fg_context({"x": cg_type("(Labeled H bool)")}, two_point)

        assert pretty_fg_type(ctx["x"]) == "(bool@L + unit@L)@H"


class TestExpressionTranslation:
    """Tests for cg2fg_expr."""

    def test_label_becomes_inl(self, two_point, parse_cg):
        result = cg2fg_expr({}, parse_cg("(label H true)"), two_point)

        assert pretty_fg_expr(result.target) == "(inl (bool@L + unit@L) true)"
        assert pretty_fg_type(result.target_type) == "(bool@L + unit@L)@H"

    def test_ret_becomes_thunk(self, two_point, parse_cg):
        """Test that a computation is suspended behind a unit-taking lambda."""
        result = cg2fg_expr({}, parse_cg("(ret true)"), two_point)

        assert isinstance(result.target, fg.Lam)
        assert pretty_fg_expr(result.target) == "(lam (u0 unit@L) [H] (inl (bool@L + unit@L) true))"

    def test_bind_marks_right_branch_dead(self, two_point, parse_cg):
        result = cg2fg_expr({}, parse_cg("(bind (ret true) (a (ret (not a))))"), two_point)

        case = result.target.body
        assert isinstance(case, fg.Case)
        assert case.dead_right
        assert isinstance(case.right, fg.Inr)

    def test_applying_thunk_runs_computation(self, two_point, parse_cg):
        """Test that forcing the thunk yields the inl-coded result."""
        result = cg2fg_expr({}, parse_cg("(bind (ret true) (a (ret (not a))))"), two_point)

        run = fg_eval(None, fg.App(result.target, fg.UnitLit()))

        assert run.value == InlV(BoolV(False))
        assert run.dead_branch_hits == 0

    def test_target_checks_at_top_pc(self, two_point, parse_cg, cg_type):
        ctx = {"x": cg_type("(Labeled H bool)")}
        result = cg2fg_expr(ctx, parse_cg("(toLabeled (unlabel x))"), two_point)

        actual = cg2fg_check(ctx, result, two_point)

        assert pretty_fg_type(actual) == pretty_fg_type(result.target_type)

    def test_ill_typed_source_rejected(self, two_point, parse_cg):
        with pytest.raises(CGTypeError):
            cg2fg_expr({}, parse_cg("(unlabel true)"), two_point)

    @pytest.mark.parametrize("name,path", [c for c in corpus_cases() if c[0].startswith("cg_")])
    def test_corpus_translations_typecheck(self, name, path):
        """Test that every CG corpus program translates to a well-typed FG term."""
        src = parse(path.read_text(encoding="utf-8"))

        result = cg2fg_expr(src.context, src.body, src.lattice)

        cg2fg_check(src.context, result, src.lattice)


class TestSemanticOracles:
    """Tests for the equivalence and dead-branch oracles on closed programs."""

    @pytest.mark.parametrize("name", ["cg_ret", "cg_label", "cg_bind_chain", "cg_state", "cg_if"])
    def test_cg2fg_results_agree(self, name):
        src = parse((_corpus(name)).read_text(encoding="utf-8"))

        verdict = equiv_check_cg2fg(src.body, lattice=src.lattice)

        assert verdict.status == "pass", verdict.records()

    @pytest.mark.parametrize("name", ["fg_identity", "fg_read_after_write", "fg_sum", "fg_pair"])
    def test_fg2cg_results_agree(self, name):
        src = parse((_corpus(name)).read_text(encoding="utf-8"))

        verdict = equiv_check_fg2cg(src.body, pc=src.lattice.bottom)

        assert verdict.status == "pass", verdict.records()

    def test_knot_times_out_on_both_sides(self):
        """Test that two timeouts agree and the verdict records both of them."""
        src = parse(_corpus("fg_knot").read_text(encoding="utf-8"))

        verdict = equiv_check_fg2cg(src.body, fuel=500, pc=src.lattice.bottom)

        assert verdict.status == "pass"
        assert verdict.timeouts == 2

    def test_zero_fuel_is_rejected(self, parse_fg, parse_cg, two_point):
        """Test that a zero budget is an error rather than a silent fallback to the default."""
        with pytest.raises(ValueError):
            equiv_check_fg2cg(parse_fg("true"), fuel=0, pc=two_point.bottom)
        with pytest.raises(ValueError):
            equiv_check_cg2fg(parse_cg("(ret true)"), fuel=0, lattice=two_point)

    def test_inr_unreachable_with_free_variables(self, two_point, parse_cg, cg_type):
        ctx = {"x": cg_type("(Labeled H bool)")}
        e = parse_cg("(toLabeled (bind (unlabel x) (y (ret (not y)))))")

        verdict = inr_check_cg2fg(e, ctx, lattice=two_point)

        assert verdict.status == "pass"


class TestGeneratedPrograms:
    """Property tests over generated CG programs."""

    @settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
    @given(seed=st.integers(min_value=0, max_value=2**31 - 1))
    def test_translation_preserves_typing(self, seed):
        from app.ifc.core.lattice import parse_lattice

        lattice = parse_lattice("2pt")
        try:
            e = gen_cg_program(12, {}, seed, lattice=lattice)
        except GenerationError:
            assume(False)

        cg2fg_check({}, cg2fg_expr({}, e, lattice), lattice)

    @settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
    @given(seed=st.integers(min_value=0, max_value=2**31 - 1))
    def test_dead_branch_never_entered(self, seed):
        from app.ifc.core.lattice import parse_lattice

        lattice = parse_lattice("2pt")
        try:
            e = gen_cg_program(10, {}, seed, lattice=lattice)
        except GenerationError:
            assume(False)

        assert inr_check_cg2fg(e, lattice=lattice).ok


def _corpus(name: str):
    return dict(corpus_cases())[name]
