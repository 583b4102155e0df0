"""
Abstract syntax of the coarse-grained language.

Only ``Labeled``, ``ref`` and ``SLIO`` types carry labels. Monadic
constructs (``ret``, ``bind``, ``unlabel``, ``toLabeled``, ``new``,
``deref``, ``assign``) denote suspended computations.
"""
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

from ..core.errors import Pos
from ..core.lattice import Label


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TBool:
    pass


@dataclass(frozen=True)
class TUnit:
    pass


@dataclass(frozen=True)
class TFun:
    arg: "CGType"
    result: "CGType"


@dataclass(frozen=True)
class TProd:
    left: "CGType"
    right: "CGType"


@dataclass(frozen=True)
class TSum:
    left: "CGType"
    right: "CGType"


@dataclass(frozen=True)
class TRef:
    """A reference holding values of type ``Labeled label payload``."""

    label: Label
    payload: "CGType"


@dataclass(frozen=True)
class TLabeled:
    label: Label
    payload: "CGType"


@dataclass(frozen=True)
class TSlio:
    """``SLIO pc taint result``."""

    pc: Label
    taint: Label
    result: "CGType"


CGType = Union[TBool, TUnit, TFun, TProd, TSum, TRef, TLabeled, TSlio]

Context = Dict[str, CGType]


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

def _pos():
    return field(default=None, compare=False, kw_only=True)


@dataclass(frozen=True)
class Var:
    name: str
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class UnitLit:
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Lam:
    param: str
    param_type: CGType
    body: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class App:
    fn: "CGExpr"
    arg: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Pair:
    left: "CGExpr"
    right: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Fst:
    expr: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Snd:
    expr: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Inl:
    annotation: TSum
    expr: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Inr:
    annotation: TSum
    expr: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Case:
    scrutinee: "CGExpr"
    left_var: str
    left: "CGExpr"
    right_var: str
    right: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class If:
    cond: "CGExpr"
    then: "CGExpr"
    orelse: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Let:
    var: str
    bound: "CGExpr"
    body: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Prim:
    op: str
    args: Tuple["CGExpr", ...]
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Ret:
    expr: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Bind:
    """``bind(comp, var. body)``."""

    comp: "CGExpr"
    var: str
    body: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class LabelE:
    """``label ℓ e``; the target label is explicit."""

    label: Label
    expr: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Unlabel:
    expr: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class ToLabeled:
    expr: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class New:
    expr: "CGExpr"
    annotation: Optional[TLabeled] = None
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Deref:
    expr: "CGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Assign:
    target: "CGExpr"
    value: "CGExpr"
    pos: Optional[Pos] = _pos()


CGExpr = Union[
    Var, UnitLit, BoolLit, Lam, App, Pair, Fst, Snd, Inl, Inr, Case, If, Let,
    Prim, Ret, Bind, LabelE, Unlabel, ToLabeled, New, Deref, Assign,
]


PRIM_ARITY = {"and": 2, "or": 2, "not": 1}


def children(e: CGExpr) -> Tuple[CGExpr, ...]:
    match e:
        case Var() | UnitLit() | BoolLit():
            return ()
        case Lam(body=body):
            return (body,)
        case App(fn, arg):
            return (fn, arg)
        case Pair(left, right):
            return (left, right)
        case Fst(expr) | Snd(expr) | Deref(expr) | Ret(expr) | Unlabel(expr) | ToLabeled(expr):
            return (expr,)
        case Inl(_, expr) | Inr(_, expr) | LabelE(_, expr):
            return (expr,)
        case New(expr):
            return (expr,)
        case Case(scrutinee, _, left, _, right):
            return (scrutinee, left, right)
        case If(cond, then, orelse):
            return (cond, then, orelse)
        case Let(_, bound, body):
            return (bound, body)
        case Bind(comp, _, body):
            return (comp, body)
        case Prim(_, args):
            return tuple(args)
        case Assign(target, value):
            return (target, value)
    raise TypeError(f"not a CG expression: {e!r}")


def size(e: CGExpr) -> int:
    return 1 + sum(size(c) for c in children(e))


def variables(e: CGExpr) -> set:
    """Every variable name occurring in ``e``, bound or free."""
    names = set()
    match e:
        case Var(name):
            names.add(name)
        case Lam(param=param):
            names.add(param)
        case Case(left_var=lv, right_var=rv):
            names.update((lv, rv))
        case Let(var=var) | Bind(var=var):
            names.add(var)
    for c in children(e):
        names |= variables(c)
    return names


def free_vars(e: CGExpr) -> set:
    match e:
        case Var(name):
            return {name}
        case Lam(param=param, body=body):
            return free_vars(body) - {param}
        case Case(scrutinee, lv, left, rv, right):
            return free_vars(scrutinee) | (free_vars(left) - {lv}) | (free_vars(right) - {rv})
        case Let(var, bound, body):
            return free_vars(bound) | (free_vars(body) - {var})
        case Bind(comp, var, body):
            return free_vars(comp) | (free_vars(body) - {var})
    out = set()
    for c in children(e):
        out |= free_vars(c)
    return out
