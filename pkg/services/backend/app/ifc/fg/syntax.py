"""
Abstract syntax of the fine-grained language.

Every type carries a label: an ``FGType`` pairs an unlabeled body with its
top-level label. Expressions record their source position in ``pos``,
which never takes part in equality.
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
    """``arg ->[latent] result``; ``latent`` bounds the body's write effects."""

    arg: "FGType"
    latent: Label
    result: "FGType"


@dataclass(frozen=True)
class TProd:
    left: "FGType"
    right: "FGType"


@dataclass(frozen=True)
class TSum:
    left: "FGType"
    right: "FGType"


@dataclass(frozen=True)
class TRef:
    payload: "FGType"


FGUnlabeledType = Union[TBool, TUnit, TFun, TProd, TSum, TRef]


@dataclass(frozen=True)
class FGType:
    body: FGUnlabeledType
    label: Label


Context = Dict[str, FGType]


def labeled(body: FGUnlabeledType, label: Label) -> FGType:
    return FGType(body, label)


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
    param_type: FGType
    latent: Label
    body: "FGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class App:
    fn: "FGExpr"
    arg: "FGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Pair:
    left: "FGExpr"
    right: "FGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Fst:
    expr: "FGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Snd:
    expr: "FGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Inl:
    """Left injection annotated with the full (unlabeled) sum type."""

    annotation: TSum
    expr: "FGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Inr:
    annotation: TSum
    expr: "FGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Case:
    """
    ``case scrutinee of inl left_var -> left | inr right_var -> right``.

    ``dead_right`` marks case nodes whose right branch is unreachable by
    construction; the evaluator counts entries into such branches.
    """

    scrutinee: "FGExpr"
    left_var: str
    left: "FGExpr"
    right_var: str
    right: "FGExpr"
    pos: Optional[Pos] = _pos()
    dead_right: bool = field(default=False, compare=False, kw_only=True)


@dataclass(frozen=True)
class If:
    cond: "FGExpr"
    then: "FGExpr"
    orelse: "FGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Let:
    var: str
    bound: "FGExpr"
    body: "FGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Prim:
    """Strict boolean primitive: ``and``, ``or`` (two args) or ``not`` (one)."""

    op: str
    args: Tuple["FGExpr", ...]
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class New:
    expr: "FGExpr"
    annotation: Optional[FGType] = None
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Deref:
    expr: "FGExpr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Assign:
    target: "FGExpr"
    value: "FGExpr"
    pos: Optional[Pos] = _pos()


FGExpr = Union[
    Var, UnitLit, BoolLit, Lam, App, Pair, Fst, Snd, Inl, Inr, Case, If, Let,
    Prim, New, Deref, Assign,
]

PRIM_ARITY = {"and": 2, "or": 2, "not": 1}


def children(e: FGExpr) -> Tuple[FGExpr, ...]:
    """Immediate subexpressions, left to right."""
    match e:
        case Var() | UnitLit() | BoolLit():
            return ()
        case Lam(body=body):
            return (body,)
        case App(fn, arg):
            return (fn, arg)
        case Pair(left, right):
            return (left, right)
        case Fst(expr) | Snd(expr) | Deref(expr):
            return (expr,)
        case Inl(_, expr) | Inr(_, expr):
            return (expr,)
        case New(expr):
            return (expr,)
        case Case(scrutinee, _, left, _, right):
            return (scrutinee, left, right)
        case If(cond, then, orelse):
            return (cond, then, orelse)
        case Let(_, bound, body):
            return (bound, body)
        case Prim(_, args):
            return tuple(args)
        case Assign(target, value):
            return (target, value)
    raise TypeError(f"not an FG expression: {e!r}")


def size(e: FGExpr) -> int:
    """Number of AST nodes."""
    return 1 + sum(size(c) for c in children(e))


def variables(e: FGExpr) -> set:
    """Every variable name occurring in ``e``, bound or free."""
    names = set()
    match e:
        case Var(name):
            names.add(name)
        case Lam(param=param):
            names.add(param)
        case Case(left_var=lv, right_var=rv):
            names.update((lv, rv))
        case Let(var=var):
            names.add(var)
    for c in children(e):
        names |= variables(c)
    return names


def free_vars(e: FGExpr) -> set:
    match e:
        case Var(name):
            return {name}
        case Lam(param=param, body=body):
            return free_vars(body) - {param}
        case Case(scrutinee, lv, left, rv, right):
            return free_vars(scrutinee) | (free_vars(left) - {lv}) | (free_vars(right) - {rv})
        case Let(var, bound, body):
            return free_vars(bound) | (free_vars(body) - {var})
    out = set()
    for c in children(e):
        out |= free_vars(c)
    return out
