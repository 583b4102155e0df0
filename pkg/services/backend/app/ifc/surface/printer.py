"""
Canonical pretty-printer for types, expressions, values and source files.

Output re-parses to an equal AST; printing a parsed file twice gives the
same text.
"""
from typing import Any, Optional

from ..cg import syntax as cg
from ..core.lattice import Label
from ..fg import syntax as fg


def pretty_label(label: Label) -> str:
    return str(label)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

def pretty_fg_body(a: fg.FGUnlabeledType) -> str:
    match a:
        case fg.TBool():
            return "bool"
        case fg.TUnit():
            return "unit"
        case fg.TFun(arg, latent, result):
            return f"({pretty_fg_type(arg)} ->[{latent}] {pretty_fg_type(result)})"
        case fg.TProd(left, right):
            return f"({pretty_fg_type(left)} * {pretty_fg_type(right)})"
        case fg.TSum(left, right):
            return f"({pretty_fg_type(left)} + {pretty_fg_type(right)})"
        case fg.TRef(payload):
            return f"(ref {pretty_fg_type(payload)})"
    raise TypeError(f"not an FG type: {a!r}")


def pretty_fg_type(t: fg.FGType) -> str:
    return f"{pretty_fg_body(t.body)}@{t.label}"


def pretty_cg_type(t: cg.CGType) -> str:
    match t:
        case cg.TBool():
            return "bool"
        case cg.TUnit():
            return "unit"
        case cg.TFun(arg, result):
            return f"({pretty_cg_type(arg)} -> {pretty_cg_type(result)})"
        case cg.TProd(left, right):
            return f"({pretty_cg_type(left)} * {pretty_cg_type(right)})"
        case cg.TSum(left, right):
            return f"({pretty_cg_type(left)} + {pretty_cg_type(right)})"
        case cg.TRef(label, payload):
            return f"(ref {label} {pretty_cg_type(payload)})"
        case cg.TLabeled(label, payload):
            return f"(Labeled {label} {pretty_cg_type(payload)})"
        case cg.TSlio(pc, taint, result):
            return f"(SLIO {pc} {taint} {pretty_cg_type(result)})"
    raise TypeError(f"not a CG type: {t!r}")


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

def _common(e: Any, rec) -> Optional[str]:
    """Forms written identically in both languages; returns None when ``e`` is not one."""
    lang = fg if type(e).__module__ == fg.__name__ else cg
    match e:
        case lang.Var(name):
            return name
        case lang.UnitLit():
            return "()"
        case lang.BoolLit(value):
            return "true" if value else "false"
        case lang.App(fn, arg):
            return f"(app {rec(fn)} {rec(arg)})"
        case lang.Pair(left, right):
            return f"(pair {rec(left)} {rec(right)})"
        case lang.Fst(inner):
            return f"(fst {rec(inner)})"
        case lang.Snd(inner):
            return f"(snd {rec(inner)})"
        case lang.Case(scrutinee, lv, left, rv, right):
            return f"(case {rec(scrutinee)} ({lv} {rec(left)}) ({rv} {rec(right)}))"
        case lang.If(cond, then, orelse):
            return f"(if {rec(cond)} {rec(then)} {rec(orelse)})"
        case lang.Let(var, bound, body):
            return f"(let ({var} {rec(bound)}) {rec(body)})"
        case lang.Prim(op, args):
            return f"({op} " + " ".join(rec(a) for a in args) + ")"
        case lang.Deref(inner):
            return f"(deref {rec(inner)})"
        case lang.Assign(target, value):
            return f"(assign {rec(target)} {rec(value)})"
    return None


def pretty_fg_expr(e: fg.FGExpr) -> str:
    match e:
        case fg.Lam(param, param_type, latent, body):
            return f"(lam ({param} {pretty_fg_type(param_type)}) [{latent}] {pretty_fg_expr(body)})"
        case fg.Inl(annotation, inner):
            return f"(inl {pretty_fg_body(annotation)} {pretty_fg_expr(inner)})"
        case fg.Inr(annotation, inner):
            return f"(inr {pretty_fg_body(annotation)} {pretty_fg_expr(inner)})"
        case fg.New(inner, annotation):
            if annotation is None:
                return f"(new {pretty_fg_expr(inner)})"
            return f"(new {pretty_fg_type(annotation)} {pretty_fg_expr(inner)})"
    out = _common(e, pretty_fg_expr)
    if out is None:
        raise TypeError(f"not an FG expression: {e!r}")
    return out


def pretty_cg_expr(e: cg.CGExpr) -> str:
    match e:
        case cg.Lam(param, param_type, body):
            return f"(lam ({param} {pretty_cg_type(param_type)}) {pretty_cg_expr(body)})"
        case cg.Inl(annotation, inner):
            return f"(inl {pretty_cg_type(annotation)} {pretty_cg_expr(inner)})"
        case cg.Inr(annotation, inner):
            return f"(inr {pretty_cg_type(annotation)} {pretty_cg_expr(inner)})"
        case cg.Ret(inner):
            return f"(ret {pretty_cg_expr(inner)})"
        case cg.Bind(comp, var, body):
            return f"(bind {pretty_cg_expr(comp)} ({var} {pretty_cg_expr(body)}))"
        case cg.LabelE(label, inner):
            return f"(label {label} {pretty_cg_expr(inner)})"
        case cg.Unlabel(inner):
            return f"(unlabel {pretty_cg_expr(inner)})"
        case cg.ToLabeled(inner):
            return f"(toLabeled {pretty_cg_expr(inner)})"
        case cg.New(inner, annotation):
            if annotation is None:
                return f"(new {pretty_cg_expr(inner)})"
            return f"(new {pretty_cg_type(annotation)} {pretty_cg_expr(inner)})"
    out = _common(e, pretty_cg_expr)
    if out is None:
        raise TypeError(f"not a CG expression: {e!r}")
    return out


def pretty_expr(e: Any) -> str:
    """Print an expression of either language."""
    if type(e).__module__ == fg.__name__:
        return pretty_fg_expr(e)
    return pretty_cg_expr(e)


def pretty_type(t: Any) -> str:
    if isinstance(t, fg.FGType):
        return pretty_fg_type(t)
    return pretty_cg_type(t)


# ---------------------------------------------------------------------------
# Source files and values
# ---------------------------------------------------------------------------

_CG_TYPES = (cg.TBool, cg.TUnit, cg.TFun, cg.TProd, cg.TSum, cg.TRef, cg.TLabeled, cg.TSlio)


def pretty(ast: Any) -> str:
    """Canonical text of a ``SourceFile``, expression or type."""
    from .source import SourceFile

    if isinstance(ast, SourceFile):
        return pretty_source(ast)
    if isinstance(ast, fg.FGType):
        return pretty_fg_type(ast)
    if isinstance(ast, Label):
        return str(ast)
    if isinstance(ast, _CG_TYPES):
        return pretty_cg_type(ast)
    return pretty_expr(ast)


def pretty_source(src) -> str:
    lines = [f"({src.language}", f"  (lattice {src.lattice.describe()})"]
    if src.context:
        show = pretty_fg_type if src.language == "fg" else pretty_cg_type
        bindings = " ".join(f"({x} {show(t)})" for x, t in src.context.items())
        lines.append(f"  (ctx {bindings})")
    body = pretty_fg_expr(src.body) if src.language == "fg" else pretty_cg_expr(src.body)
    lines.append(f"  {body})")
    return "\n".join(lines) + "\n"


def render_value(v: Any) -> str:
    """Runtime values print via their ``__str__``; computations print opaquely."""
    return str(v)
