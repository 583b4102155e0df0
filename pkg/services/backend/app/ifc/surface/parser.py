"""
Parser from s-expressions to FG and CG abstract syntax.

File form::

    (fg (lattice 2pt) (ctx (x bool@H)) body)
    (cg (lattice (powerset a b)) body)

``lattice`` and ``ctx`` are optional. The grammar is documented in
``docs/grammar.md``.
"""
import re
from typing import Optional

from ..cg import syntax as cg
from ..core.config import default_lattice
from ..core.errors import LabelSyntaxError, ParseError
from ..core.lattice import Label, Lattice, parse_lattice
from ..fg import syntax as fg
from .sexpr import Atom, Latent, SExpr, SList, format_sexpr, read_one
from .source import LANGUAGES, SourceFile

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")

_FG_KEYWORDS = {
    "lam", "app", "pair", "fst", "snd", "inl", "inr", "case", "if", "let",
    "and", "or", "not", "new", "deref", "assign", "true", "false",
}
_CG_KEYWORDS = _FG_KEYWORDS | {"ret", "bind", "label", "unlabel", "toLabeled"}


def _fail(message: str, s: SExpr) -> ParseError:
    return ParseError(message, *s.pos)


class _Parser:
    def __init__(self, lattice: Lattice, keywords: set):
        self.lattice = lattice
        self.keywords = keywords

    # -- shared pieces -------------------------------------------------------

    def label(self, s: SExpr) -> Label:
        if not isinstance(s, (Atom, Latent)):
            raise _fail(f"expected a label, got {format_sexpr(s)}", s)
        return self.label_text(s.text, s)

    def label_text(self, text: str, s: SExpr) -> Label:
        try:
            return self.lattice.label(text)
        except LabelSyntaxError as exc:
            raise _fail(str(exc), s) from None

    def ident(self, s: SExpr) -> str:
        if not isinstance(s, Atom) or not _IDENT_RE.fullmatch(s.text) or s.text in self.keywords:
            raise _fail(f"expected a variable name, got {format_sexpr(s)}", s)
        return s.text

    def binder(self, s: SExpr, parse_body):
        """``(x e)`` as used by case branches, let and bind."""
        if not isinstance(s, SList) or len(s.items) != 2:
            raise _fail(f"expected a binder (x e), got {format_sexpr(s)}", s)
        return self.ident(s.items[0]), parse_body(s.items[1])

    @staticmethod
    def form(s: SExpr):
        """Split ``(head args...)`` into ``(head, args)``; atoms give ``(None, ())``."""
        if isinstance(s, SList) and s.items and isinstance(s.items[0], Atom):
            return s.items[0].text, s.items[1:]
        return None, ()

    @staticmethod
    def arity(s: SExpr, head: str, args, *counts: int) -> None:
        if len(args) not in counts:
            expected = " or ".join(str(c) for c in counts)
            raise _fail(f"'{head}' takes {expected} argument(s), got {len(args)}", s)

    # -- FG types -----------------------------------------------------------

    def fg_type(self, s: SExpr) -> fg.FGType:
        if isinstance(s, Atom):
            base, _, label_text = s.text.partition("@")
            label = self.label_text(label_text, s) if label_text else self.lattice.bottom
            if base == "bool":
                return fg.FGType(fg.TBool(), label)
            if base == "unit":
                return fg.FGType(fg.TUnit(), label)
            raise _fail(f"unknown FG type '{s.text}'", s)
        if isinstance(s, SList):
            label = self.label_text(s.suffix, s) if s.suffix else self.lattice.bottom
            return fg.FGType(self._fg_list_body(s), label)
        raise _fail(f"expected an FG type, got {format_sexpr(s)}", s)

    def fg_sum(self, s: SExpr) -> fg.TSum:
        """Unlabeled sum annotation of an injection."""
        if not isinstance(s, SList) or s.suffix:
            raise _fail(f"expected an unlabeled sum type (τ + τ), got {format_sexpr(s)}", s)
        body = self._fg_list_body(s)
        if not isinstance(body, fg.TSum):
            raise _fail(f"expected a sum type, got {format_sexpr(s)}", s)
        return body

    def _fg_list_body(self, s: SList) -> fg.FGUnlabeledType:
        items = s.items
        if len(items) == 2 and isinstance(items[0], Atom) and items[0].text == "ref":
            return fg.TRef(self.fg_type(items[1]))
        if len(items) == 4 and isinstance(items[1], Atom) and items[1].text == "->" and isinstance(items[2], Latent):
            return fg.TFun(self.fg_type(items[0]), self.label(items[2]), self.fg_type(items[3]))
        if len(items) == 3 and isinstance(items[1], Atom) and items[1].text in ("*", "+"):
            left, right = self.fg_type(items[0]), self.fg_type(items[2])
            return fg.TProd(left, right) if items[1].text == "*" else fg.TSum(left, right)
        raise _fail(f"malformed FG type {format_sexpr(s)}", s)

    # -- CG types -----------------------------------------------------------

    def cg_type(self, s: SExpr) -> cg.CGType:
        if isinstance(s, Atom):
            if s.text == "bool":
                return cg.TBool()
            if s.text == "unit":
                return cg.TUnit()
            raise _fail(f"unknown CG type '{s.text}'", s)
        if not isinstance(s, SList) or s.suffix:
            raise _fail(f"expected a CG type, got {format_sexpr(s)}", s)
        items = s.items
        head = items[0].text if items and isinstance(items[0], Atom) else None
        if head == "ref" and len(items) == 3:
            return cg.TRef(self.label(items[1]), self.cg_type(items[2]))
        if head == "Labeled" and len(items) == 3:
            return cg.TLabeled(self.label(items[1]), self.cg_type(items[2]))
        if head == "SLIO" and len(items) == 4:
            return cg.TSlio(self.label(items[1]), self.label(items[2]), self.cg_type(items[3]))
        if len(items) == 3 and isinstance(items[1], Atom) and items[1].text in ("->", "*", "+"):
            left, right = self.cg_type(items[0]), self.cg_type(items[2])
            op = items[1].text
            if op == "->":
                return cg.TFun(left, right)
            return cg.TProd(left, right) if op == "*" else cg.TSum(left, right)
        raise _fail(f"malformed CG type {format_sexpr(s)}", s)

    # -- expressions shared by both languages ---------------------------------

    def common(self, lang, s: SExpr, rec):
        """Parse forms spelled the same in FG and CG; None when ``s`` is not one."""
        pos = s.pos
        if isinstance(s, Atom):
            if s.text == "true":
                return lang.BoolLit(True, pos=pos)
            if s.text == "false":
                return lang.BoolLit(False, pos=pos)
            return lang.Var(self.ident(s), pos=pos)
        if isinstance(s, Latent):
            raise _fail(f"unexpected latent label [{s.text}]", s)
        if s.suffix:
            raise _fail("label suffixes are only allowed on types", s)
        if not s.items:
            return lang.UnitLit(pos=pos)
        head, args = self.form(s)
        if head is None:
            raise _fail(f"expected a keyword at the head of {format_sexpr(s)}", s)
        match head:
            case "app":
                self.arity(s, head, args, 2)
                return lang.App(rec(args[0]), rec(args[1]), pos=pos)
            case "pair":
                self.arity(s, head, args, 2)
                return lang.Pair(rec(args[0]), rec(args[1]), pos=pos)
            case "fst" | "snd":
                self.arity(s, head, args, 1)
                cls = lang.Fst if head == "fst" else lang.Snd
                return cls(rec(args[0]), pos=pos)
            case "case":
                self.arity(s, head, args, 3)
                lv, left = self.binder(args[1], rec)
                rv, right = self.binder(args[2], rec)
                return lang.Case(rec(args[0]), lv, left, rv, right, pos=pos)
            case "if":
                self.arity(s, head, args, 3)
                return lang.If(rec(args[0]), rec(args[1]), rec(args[2]), pos=pos)
            case "let":
                self.arity(s, head, args, 2)
                var, bound = self.binder(args[0], rec)
                return lang.Let(var, bound, rec(args[1]), pos=pos)
            case "and" | "or":
                self.arity(s, head, args, 2)
                return lang.Prim(head, (rec(args[0]), rec(args[1])), pos=pos)
            case "not":
                self.arity(s, head, args, 1)
                return lang.Prim(head, (rec(args[0]),), pos=pos)
            case "deref":
                self.arity(s, head, args, 1)
                return lang.Deref(rec(args[0]), pos=pos)
            case "assign":
                self.arity(s, head, args, 2)
                return lang.Assign(rec(args[0]), rec(args[1]), pos=pos)
        return None

    # -- FG expressions -----------------------------------------------------

    def fg_expr(self, s: SExpr) -> fg.FGExpr:
        head, args = self.form(s)
        pos = s.pos
        match head:
            case "lam":
                self.arity(s, head, args, 3)
                param, param_type = self._param(args[0], self.fg_type)
                if not isinstance(args[1], Latent):
                    raise _fail("FG lambdas need a latent label [l] after the parameter", args[1])
                return fg.Lam(param, param_type, self.label(args[1]), self.fg_expr(args[2]), pos=pos)
            case "inl" | "inr":
                self.arity(s, head, args, 2)
                cls = fg.Inl if head == "inl" else fg.Inr
                return cls(self.fg_sum(args[0]), self.fg_expr(args[1]), pos=pos)
            case "new":
                self.arity(s, head, args, 1, 2)
                if len(args) == 1:
                    return fg.New(self.fg_expr(args[0]), pos=pos)
                return fg.New(self.fg_expr(args[1]), self.fg_type(args[0]), pos=pos)
        out = self.common(fg, s, self.fg_expr)
        if out is None:
            raise _fail(f"unknown FG form '{head}'", s)
        return out

    def _param(self, s: SExpr, parse_type):
        if not isinstance(s, SList) or len(s.items) != 2 or s.suffix:
            raise _fail(f"expected a parameter (x T), got {format_sexpr(s)}", s)
        return self.ident(s.items[0]), parse_type(s.items[1])

    # -- CG expressions -----------------------------------------------------

    def cg_expr(self, s: SExpr) -> cg.CGExpr:
        head, args = self.form(s)
        pos = s.pos
        match head:
            case "lam":
                self.arity(s, head, args, 2)
                param, param_type = self._param(args[0], self.cg_type)
                return cg.Lam(param, param_type, self.cg_expr(args[1]), pos=pos)
            case "inl" | "inr":
                self.arity(s, head, args, 2)
                annotation = self.cg_type(args[0])
                if not isinstance(annotation, cg.TSum):
                    raise _fail("injection annotation must be a sum type", args[0])
                cls = cg.Inl if head == "inl" else cg.Inr
                return cls(annotation, self.cg_expr(args[1]), pos=pos)
            case "ret" | "unlabel" | "toLabeled":
                self.arity(s, head, args, 1)
                cls = {"ret": cg.Ret, "unlabel": cg.Unlabel, "toLabeled": cg.ToLabeled}[head]
                return cls(self.cg_expr(args[0]), pos=pos)
            case "bind":
                self.arity(s, head, args, 2)
                var, body = self.binder(args[1], self.cg_expr)
                return cg.Bind(self.cg_expr(args[0]), var, body, pos=pos)
            case "label":
                self.arity(s, head, args, 2)
                return cg.LabelE(self.label(args[0]), self.cg_expr(args[1]), pos=pos)
            case "new":
                self.arity(s, head, args, 1, 2)
                if len(args) == 1:
                    return cg.New(self.cg_expr(args[0]), pos=pos)
                annotation = self.cg_type(args[0])
                if not isinstance(annotation, cg.TLabeled):
                    raise _fail("new annotation must be a Labeled type", args[0])
                return cg.New(self.cg_expr(args[1]), annotation, pos=pos)
        out = self.common(cg, s, self.cg_expr)
        if out is None:
            raise _fail(f"unknown CG form '{head}'", s)
        return out


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def parse(text: str, lattice: Optional[Lattice] = None) -> SourceFile:
    """
    Parse a complete source file.

    Args:
        text: file contents
        lattice: overrides the file's ``(lattice ...)`` declaration when given

    Raises:
        ParseError: with line and column of the problem
    """
    top = read_one(text)
    head, items = _Parser.form(top)
    if head not in LANGUAGES:
        raise _fail("a source file must start with (fg ...) or (cg ...)", top)
    items = list(items)

    declared = None
    if items and _Parser.form(items[0])[0] == "lattice":
        decl = items.pop(0)
        if len(decl.items) != 2:
            raise _fail("(lattice ...) takes exactly one description", decl)
        try:
            declared = parse_lattice(format_sexpr(decl.items[1]))
        except LabelSyntaxError as exc:
            raise _fail(str(exc), decl) from None
    lattice = lattice or declared or default_lattice()

    parser = _Parser(lattice, _FG_KEYWORDS if head == "fg" else _CG_KEYWORDS)
    parse_type = parser.fg_type if head == "fg" else parser.cg_type

    context = {}
    if items and _Parser.form(items[0])[0] == "ctx":
        decl = items.pop(0)
        for binding in decl.items[1:]:
            name, t = parser._param(binding, parse_type)
            if name in context:
                raise _fail(f"variable '{name}' declared twice", binding)
            context[name] = t

    if len(items) != 1:
        raise _fail(f"expected exactly one body expression, found {len(items)}", top)
    body = parser.fg_expr(items[0]) if head == "fg" else parser.cg_expr(items[0])
    return SourceFile(head, lattice, body, context)


def parse_fg_expr(text: str, lattice: Optional[Lattice] = None) -> fg.FGExpr:
    return _Parser(lattice or default_lattice(), _FG_KEYWORDS).fg_expr(read_one(text))


def parse_cg_expr(text: str, lattice: Optional[Lattice] = None) -> cg.CGExpr:
    return _Parser(lattice or default_lattice(), _CG_KEYWORDS).cg_expr(read_one(text))


def parse_fg_type(text: str, lattice: Optional[Lattice] = None) -> fg.FGType:
    return _Parser(lattice or default_lattice(), _FG_KEYWORDS).fg_type(read_one(text))


def parse_cg_type(text: str, lattice: Optional[Lattice] = None) -> cg.CGType:
    return _Parser(lattice or default_lattice(), _CG_KEYWORDS).cg_type(read_one(text))


def parse_label(text: str, lattice: Optional[Lattice] = None) -> Label:
    lattice = lattice or default_lattice()
    try:
        return lattice.label(text)
    except LabelSyntaxError as exc:
        raise ParseError(str(exc), 1, 1) from None
