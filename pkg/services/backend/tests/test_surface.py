"""
Tests for the s-expression reader, the parser and the printer.
"""
import pytest

from app.ifc.core.errors import ParseError
from app.ifc.surface.parser import parse, parse_cg_type, parse_fg_expr, parse_fg_type, parse_label
from app.ifc.surface.printer import pretty, pretty_cg_expr, pretty_fg_expr, pretty_fg_type
from app.ifc.surface.sexpr import Atom, Latent, SList, format_sexpr, read_all
from tests.conftest import corpus_cases, leak_cases


class TestReader:
    """Tests for the s-expression reader."""

    def test_label_suffixes_and_latents(self):
        s, = read_all("((bool@H ->[L] unit)@H x)")

        assert isinstance(s, SList)
        fun = s.items[0]
        assert fun.suffix == "H"
        assert fun.items[0] == Atom("bool@H", (1, 3))
        assert isinstance(fun.items[1], Atom) and fun.items[1].text == "->"
        assert isinstance(fun.items[2], Latent) and fun.items[2].text == "L"

    def test_product_label_is_one_atom(self):
        s, = read_all("(Labeled (H,{a}) bool)")

        assert s.items[1].text == "(H,{a})"

    def test_comments_are_skipped(self):
        forms = read_all("; header: x\n(fg true) ; trailing\n")

        assert len(forms) == 1
        assert format_sexpr(forms[0]) == "(fg true)"

    def test_positions(self):
        s, = read_all("(fg\n  (not x))")

        assert s.items[1].pos == (2, 3)
        assert s.items[1].items[1].pos == (2, 8)

    @pytest.mark.parametrize("text,message", [
        ("(fg true", "unclosed"),
        ("(fg true))", "unexpected ')'"),
        ("(fg [L true)", "unterminated"),
        ("bool@", "expected a label"),
    ])
    def test_malformed_input(self, text, message):
        with pytest.raises(ParseError) as exc:
            read_all(text)

        assert message in exc.value.message


class TestParser:
    """Tests for the parser entry points."""

    def test_source_file_parts(self):
        src = parse("(fg (lattice (powerset a b)) (ctx (x bool@{a}) (y unit)) (if x y y))")

        assert src.language == "fg"
        assert src.lattice.describe() == "(powerset a b)"
        assert list(src.context) == ["x", "y"]
        assert pretty_fg_type(src.context["x"]) == "bool@{a}"
        assert pretty_fg_type(src.context["y"]) == "unit@bot"

    def test_default_lattice_is_two_point(self):
        assert parse("(cg (ret true))").lattice.describe() == "2pt"

    def test_lattice_override_wins(self, powerset_ab):
        src = parse("(fg (lattice 2pt) (ctx (x bool@{b})) x)", powerset_ab)

        assert src.lattice == powerset_ab

    def test_unlabeled_types_default_to_bottom(self, low):
        assert parse_fg_type("(bool * unit)").label == low
        assert parse_fg_type("(bool * unit)").body.left.label == low

    def test_cg_types(self):
        t = parse_cg_type("(SLIO H L ((Labeled H bool) -> (ref L unit)))")

        assert str(t.pc) == "H"
        assert str(t.result.result.label) == "L"

    def test_product_labels(self):
        lattice_text = "(product 2pt (powerset a))"
        src = parse(f"(fg (lattice {lattice_text}) (ctx (x bool@(H,{{a}}))) x)")

        assert str(src.context["x"].label) == "(H,{a})"

    def test_new_with_and_without_annotation(self):
        assert parse_fg_expr("(new true)").annotation is None
        assert pretty_fg_type(parse_fg_expr("(new bool@H true)").annotation) == "bool@H"

    def test_label_aliases(self, powerset_ab):
        assert parse_label("bot", powerset_ab) == powerset_ab.bottom
        assert parse_label("top", powerset_ab) == powerset_ab.top

    @pytest.mark.parametrize("text,message,pos", [
        ("(ml true)", "must start with (fg ...) or (cg ...)", (1, 1)),
        ("(fg (app true))", "'app' takes 2 argument(s), got 1", (1, 5)),
        ("(fg (lam (x bool) x))", "'lam' takes 3 argument(s), got 2", (1, 5)),
        ("(fg (lam (x bool) L x))", "latent label", (1, 19)),
        ("(fg (ret true))", "unknown FG form 'ret'", (1, 5)),
        ("(cg (label Q true))", "Q", (1, 12)),
        ("(fg (ctx (x bool) (x unit)) x)", "declared twice", (1, 19)),
        ("(fg (let (if true) if))", "expected a variable name", (1, 11)),
        ("(cg (new bool (label L true)))", "Labeled", (1, 10)),
        ("(fg true false)", "exactly one body expression", (1, 1)),
        ("(fg (lattice (powerset a a)) true)", "distinct", (1, 5)),
    ])
    def test_parse_errors_carry_positions(self, text, message, pos):
        with pytest.raises(ParseError) as exc:
            parse(text)

        assert message in exc.value.message
        assert (exc.value.line, exc.value.column) == pos


class TestPrinter:
    """Tests for canonical printing."""

    def test_expressions(self, parse_fg, parse_cg):
        assert pretty_fg_expr(parse_fg("(lam (x bool) [H] (not x))")) == "(lam (x bool@L) [H] (not x))"
        assert pretty_cg_expr(parse_cg("(bind (ret ()) (u (label H true)))")) == "(bind (ret ()) (u (label H true)))"

    def test_source_file(self):
        text = pretty(parse("(cg (ctx (x (Labeled H bool))) (unlabel x))"))

        assert text == "(cg\n  (lattice 2pt)\n  (ctx (x (Labeled H bool)))\n  (unlabel x))\n"

    @pytest.mark.parametrize("name,path", corpus_cases() + leak_cases())
    def test_print_reparse(self, name, path):
        """Test that printing a parsed file reparses to the same program and is stable."""
        src = parse(path.read_text(encoding="utf-8"))

        once = pretty(src)
        again = parse(once)

        assert again.body == src.body
        assert again.context == src.context
        assert pretty(again) == once
