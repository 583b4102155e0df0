"""
Tests for the CG type language: subtyping and the checker.
"""
import pytest

from app.ifc.cg.checker import cg_typecheck
from app.ifc.cg.subtyping import cg_subtype, join_types, meet_types
from app.ifc.core.errors import CGTypeError
from app.ifc.surface.printer import pretty_cg_type


@pytest.fixture
def check(two_point, cg_type):
    """Fixture typechecking CG text under a context given as type text."""
    from app.ifc.surface.parser import parse_cg_expr

    def _check(text: str, **ctx: str):
        context = {x: cg_type(t) for x, t in ctx.items()}
        return pretty_cg_type(cg_typecheck(context, parse_cg_expr(text, two_point), two_point))
    return _check


class TestSubtyping:
    """Tests for CG subtyping and bounds."""

    def test_labeled_is_covariant(self, cg_type):
        assert cg_subtype(cg_type("(Labeled L bool)"), cg_type("(Labeled H bool)"))
        assert not cg_subtype(cg_type("(Labeled H bool)"), cg_type("(Labeled L bool)"))

    def test_slio_variance(self, cg_type):
        """Test that SLIO is contravariant in pc and covariant in taint."""
        assert cg_subtype(cg_type("(SLIO H L bool)"), cg_type("(SLIO L H bool)"))
        assert not cg_subtype(cg_type("(SLIO L L bool)"), cg_type("(SLIO H L bool)"))

    def test_references_are_invariant(self, cg_type):
        assert cg_subtype(cg_type("(ref L bool)"), cg_type("(ref L bool)"))
        assert not cg_subtype(cg_type("(ref L bool)"), cg_type("(ref H bool)"))

    def test_function_argument_contravariant(self, cg_type):
        assert cg_subtype(cg_type("((Labeled H bool) -> bool)"), cg_type("((Labeled L bool) -> bool)"))

    def test_join_and_meet_of_computations(self, cg_type):
        a, b = cg_type("(SLIO H L bool)"), cg_type("(SLIO L H bool)")

        assert pretty_cg_type(join_types(a, b)) == "(SLIO L H bool)"
        assert pretty_cg_type(meet_types(a, b)) == "(SLIO H L bool)"

    def test_join_of_mismatched_shapes(self, cg_type):
        assert join_types(cg_type("bool"), cg_type("(Labeled L bool)")) is None


class TestChecker:
    """Tests for the CG checker."""

    def test_pure_forms(self, check):
        assert check("(pair true ())") == "(bool * unit)"
        assert check("(lam (x bool) (not x))") == "(bool -> bool)"
        assert check("(label H true)") == "(Labeled H bool)"

    def test_ret_has_top_pc_and_bottom_taint(self, check):
        assert check("(ret true)") == "(SLIO H L bool)"

    def test_unlabel_taints(self, check):
        assert check("(unlabel x)", x="(Labeled H bool)") == "(SLIO H H bool)"

    def test_bind_meets_pc_and_joins_taint(self, check):
        """Test the bind rule's result labels."""
        text = "(bind (unlabel x) (y (ret (not y))))"

        assert check(text, x="(Labeled H bool)") == "(SLIO H H bool)"

    def test_bind_rejects_taint_above_continuation_pc(self, check):
        """Test that a tainted computation cannot be followed by a low write."""
        text = "(bind (unlabel x) (y (assign r (label L y))))"

        with pytest.raises(CGTypeError) as exc:
            check(text, x="(Labeled H bool)", r="(ref L bool)")

        assert exc.value.rule == "CG-bind"

    def test_to_labeled_moves_taint_into_label(self, check):
        assert check("(toLabeled (unlabel x))", x="(Labeled H bool)") == "(SLIO H L (Labeled H bool))"

    def test_heap_operations(self, check):
        """Test the pc and result types of new, deref and assign."""
        assert check("(new (label H true))") == "(SLIO H L (ref H bool))"
        assert check("(deref r)", r="(ref L bool)") == "(SLIO H L (Labeled L bool))"
        assert check("(assign r (label L true))", r="(ref L bool)") == "(SLIO L L unit)"

    def test_annotated_new_uses_annotation(self, check):
        assert check("(new (Labeled H bool) (label L true))") == "(SLIO H L (ref H bool))"

    def test_new_needs_labeled_contents(self, check):
        with pytest.raises(CGTypeError) as exc:
            check("(new true)")

        assert exc.value.rule == "CG-ref"

    def test_if_joins_computation_types(self, check):
        text = "(if b (ret true) (assign r (label L true)))"

        with pytest.raises(CGTypeError):
            check(text, b="bool", r="(ref L bool)")
        assert check("(if b (ret true) (ret false))", b="bool") == "(SLIO H L bool)"

    @pytest.mark.parametrize("text,rule", [
        ("y", "CG-var"),
        ("(app true true)", "CG-app"),
        ("(snd true)", "CG-snd"),
        ("(case true (a a) (b b))", "CG-case"),
        ("(if () true false)", "CG-if"),
        ("(not ())", "CG-prim"),
        ("(bind true (x (ret x)))", "CG-bind"),
        ("(unlabel true)", "CG-unlabel"),
        ("(toLabeled true)", "CG-toLabeled"),
        ("(deref true)", "CG-deref"),
        ("(assign true (label L true))", "CG-assign"),
        ("(inr (bool + unit) true)", "CG-inr"),
    ])
    def test_rule_names(self, check, text, rule):
        """Test that each rejection names the rule whose premise failed."""
        with pytest.raises(CGTypeError) as exc:
            check(text)

        assert exc.value.rule == rule
