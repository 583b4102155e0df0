"""
Type-directed translation from CG to FG.

A source judgment ``Γ ⊢ e : τ`` maps to ``⟦Γ⟧ ⊢_⊤ e_t : ⟦τ⟧``. Computations
become thunks and labeled values use the sum coding:

    ⟦b⟧               = b^⊥
    ⟦τ1 -> τ2⟧        = (⟦τ1⟧ ->[⊤] ⟦τ2⟧)^⊥
    ⟦Labeled ℓ τ⟧     = (⟦τ⟧ + unit)^ℓ
    ⟦ref ℓ τ⟧         = (ref (⟦τ⟧ + unit)^ℓ)^⊥
    ⟦SLIO ℓ1 ℓ2 τ⟧    = (unit ->[ℓ1] (⟦τ⟧ + unit)^ℓ2)^⊥

Translated computations only ever produce ``inl`` results; the ``inr``
branch emitted for bind is marked dead so instrumented runs can assert it.
Cells hold sum-coded labeled values, so new, deref and assign store and
load them unchanged inside a thunk.
"""
import logging
from typing import Mapping, Optional

from ..cg import syntax as cg
from ..cg.checker import cg_typecheck
from ..core.errors import IFCError, TranslationInvariantError
from ..core.lattice import Label, Lattice
from ..core.config import default_lattice
from ..core.names import FreshNames
from ..fg import syntax as fg
from ..fg.checker import fg_typecheck
from ..fg.subtyping import fg_subtype
from ..surface.printer import pretty_fg_type
from .result import TransResult

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

def cg2fg_type(t: cg.CGType, lattice: Lattice) -> fg.FGType:
    bot, top = lattice.bottom, lattice.top
    match t:
        case cg.TBool():
            return fg.FGType(fg.TBool(), bot)
        case cg.TUnit():
            return fg.FGType(fg.TUnit(), bot)
        case cg.TFun(arg, result):
            return fg.FGType(fg.TFun(cg2fg_type(arg, lattice), top, cg2fg_type(result, lattice)), bot)
        case cg.TProd(left, right):
            return fg.FGType(fg.TProd(cg2fg_type(left, lattice), cg2fg_type(right, lattice)), bot)
        case cg.TSum(left, right):
            return fg.FGType(fg.TSum(cg2fg_type(left, lattice), cg2fg_type(right, lattice)), bot)
        case cg.TRef(label, payload):
            return fg.FGType(fg.TRef(fg.FGType(coded_sum(payload, lattice), label)), bot)
        case cg.TLabeled(label, payload):
            return fg.FGType(coded_sum(payload, lattice), label)
        case cg.TSlio(pc, taint, result):
            unit = fg.FGType(fg.TUnit(), bot)
            return fg.FGType(fg.TFun(unit, pc, fg.FGType(coded_sum(result, lattice), taint)), bot)
    raise TranslationInvariantError(f"not a CG type: {t!r}")


def coded_sum(t: cg.CGType, lattice: Lattice) -> fg.TSum:
    """The unlabeled coding ``⟦τ⟧ + unit``."""
    return fg.TSum(cg2fg_type(t, lattice), fg.FGType(fg.TUnit(), lattice.bottom))


def cg2fg_context(ctx: Mapping[str, cg.CGType], lattice: Lattice) -> dict:
    return {x: cg2fg_type(t, lattice) for x, t in ctx.items()}


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

def cg2fg_expr(ctx: Mapping[str, cg.CGType], e: cg.CGExpr, lattice: Optional[Lattice] = None) -> TransResult:
    """
    Translate a well-typed CG expression.

    Raises:
        CGTypeError: the source does not typecheck under ctx
    """
    lattice = lattice or default_lattice()
    source_type = cg_typecheck(ctx, e, lattice)
    names = FreshNames(cg.variables(e) | set(ctx))
    target = _CG2FG(lattice, names).trans(dict(ctx), e)
    logger.info(f"cg2fg translated {cg.size(e)} source nodes into {fg.size(target)} target nodes")
    return TransResult(target, source_type, cg2fg_type(source_type, lattice))


def cg2fg_check(ctx: Mapping[str, cg.CGType], result: TransResult, lattice: Optional[Lattice] = None) -> fg.FGType:
    """
    Re-typecheck a translation at pc ⊤ and confirm its type is below ``⟦τ⟧``.

    Raises:
        TranslationInvariantError: the target is ill-typed or its type is too large
    """
    lattice = lattice or default_lattice()
    try:
        actual = fg_typecheck(cg2fg_context(ctx, lattice), lattice.top, result.target)
    except IFCError as exc:
        raise TranslationInvariantError(f"translated term does not typecheck: {exc}") from exc
    if not fg_subtype(actual, result.target_type):
        raise TranslationInvariantError(
            f"translated term has type {pretty_fg_type(actual)}, "
            f"expected a subtype of {pretty_fg_type(result.target_type)}"
        )
    return actual


class _CG2FG:
    def __init__(self, lattice: Lattice, names: FreshNames):
        self.lattice = lattice
        self.names = names

    def _type(self, ctx: dict, e: cg.CGExpr) -> cg.CGType:
        return cg_typecheck(ctx, e, self.lattice)

    def _fg(self, t: cg.CGType) -> fg.FGType:
        return cg2fg_type(t, self.lattice)

    def _thunk(self, latent: Label, body: fg.FGExpr) -> fg.Lam:
        unit = fg.FGType(fg.TUnit(), self.lattice.bottom)
        return fg.Lam(self.names.fresh("u"), unit, latent, body)

    def _force(self, thunk: fg.FGExpr) -> fg.App:
        return fg.App(thunk, fg.UnitLit())

    def _inl(self, payload_type: cg.CGType, e: fg.FGExpr) -> fg.Inl:
        return fg.Inl(coded_sum(payload_type, self.lattice), e)

    def trans(self, ctx: dict, e: cg.CGExpr) -> fg.FGExpr:
        top = self.lattice.top
        match e:
            case cg.Var(name):
                return fg.Var(name)

            case cg.UnitLit():
                return fg.UnitLit()

            case cg.BoolLit(value):
                return fg.BoolLit(value)

            case cg.Lam(param, param_type, body):
                return fg.Lam(param, self._fg(param_type), top, self.trans({**ctx, param: param_type}, body))

            case cg.App(fn, arg):
                return fg.App(self.trans(ctx, fn), self.trans(ctx, arg))

            case cg.Pair(left, right):
                return fg.Pair(self.trans(ctx, left), self.trans(ctx, right))

            case cg.Fst(inner):
                return fg.Fst(self.trans(ctx, inner))

            case cg.Snd(inner):
                return fg.Snd(self.trans(ctx, inner))

            case cg.Inl(annotation, inner) | cg.Inr(annotation, inner):
                inject = fg.Inl if isinstance(e, cg.Inl) else fg.Inr
                return inject(self._fg(annotation).body, self.trans(ctx, inner))

            case cg.Case(scrutinee, left_var, left, right_var, right):
                scrut_t = self._type(ctx, scrutinee)
                return fg.Case(
                    self.trans(ctx, scrutinee),
                    left_var, self.trans({**ctx, left_var: scrut_t.left}, left),
                    right_var, self.trans({**ctx, right_var: scrut_t.right}, right),
                )

            case cg.If(cond, then, orelse):
                return fg.If(self.trans(ctx, cond), self.trans(ctx, then), self.trans(ctx, orelse))

            case cg.Let(var, bound, body):
                bound_t = self._type(ctx, bound)
                return fg.Let(var, self.trans(ctx, bound), self.trans({**ctx, var: bound_t}, body))

            case cg.Prim(op, args):
                return fg.Prim(op, tuple(self.trans(ctx, a) for a in args))

            case cg.LabelE(_, inner):
                return self._inl(self._type(ctx, inner), self.trans(ctx, inner))

            case cg.Unlabel(inner):
                return self._thunk(top, self.trans(ctx, inner))

            case cg.Ret(inner):
                return self._thunk(top, self._inl(self._type(ctx, inner), self.trans(ctx, inner)))

            case cg.ToLabeled(inner):
                m = self._type(ctx, inner)
                labeled = cg.TLabeled(m.taint, m.result)
                return self._thunk(m.pc, self._inl(labeled, self._force(self.trans(ctx, inner))))

            case cg.Bind(comp, var, body):
                node = self._type(ctx, e)
                m = self._type(ctx, comp)
                comp_t = self._force(self.trans(ctx, comp))
                body_t = self._force(self.trans({**ctx, var: m.result}, body))
                dead = self.names.fresh("y")
                case = fg.Case(
                    comp_t, var, body_t,
                    dead, fg.Inr(coded_sum(node.result, self.lattice), fg.UnitLit()),
                    dead_right=True,
                )
                return self._thunk(node.pc, case)

            case cg.New(inner, annotation):
                payload = annotation if annotation is not None else self._type(ctx, inner)
                ref_t = cg.TRef(payload.label, payload.payload)
                alloc = fg.New(self.trans(ctx, inner), self._fg(payload))
                return self._thunk(payload.label, self._inl(ref_t, alloc))

            case cg.Deref(inner):
                ref_t = self._type(ctx, inner)
                labeled = cg.TLabeled(ref_t.label, ref_t.payload)
                return self._thunk(top, self._inl(labeled, fg.Deref(self.trans(ctx, inner))))

            case cg.Assign(target, value):
                ref_t = self._type(ctx, target)
                write = fg.Assign(self.trans(ctx, target), self.trans(ctx, value))
                return self._thunk(ref_t.label, self._inl(cg.TUnit(), write))

        raise TranslationInvariantError(f"not a CG expression: {e!r}")
