"""
Type-directed translation from FG to CG.

A source judgment ``Γ ⊢_pc e : τ`` maps to a target term ``e_t`` with
``⟦Γ⟧ ⊢ e_t : SLIO pc ⊥ ⟦τ⟧``. Types translate as

    ⟦A^ℓ⟧           = Labeled ℓ ⟦A⟧
    ⟦τ1 ->[ℓe] τ2⟧  = ⟦τ1⟧ -> SLIO ℓe ⊥ ⟦τ2⟧
    ⟦ref A^ℓ⟧       = ref ℓ ⟦A⟧

with bool, unit, products and sums mapped homomorphically. Eliminations
that raise the result label go through ``coerce_taint``, the defined term
``λx. toLabeled(bind(x, y. unlabel y))``.
"""
import logging
from typing import Mapping, Optional, Union

from ..cg import syntax as cg
from ..cg.checker import cg_typecheck
from ..cg.subtyping import cg_subtype
from ..core.errors import IFCError, TranslationInvariantError
from ..core.lattice import Label
from ..core.names import FreshNames
from ..fg import syntax as fg
from ..fg.checker import fg_typecheck
from ..fg.subtyping import raise_label
from ..surface.printer import pretty_cg_type
from .result import TransResult

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

def fg2cg_type(t: Union[fg.FGType, fg.FGUnlabeledType]) -> cg.CGType:
    """Translate a labeled or unlabeled FG type."""
    if isinstance(t, fg.FGType):
        return cg.TLabeled(t.label, fg2cg_type(t.body))
    match t:
        case fg.TBool():
            return cg.TBool()
        case fg.TUnit():
            return cg.TUnit()
        case fg.TFun(arg, latent, result):
            bottom = latent.lattice.bottom
            return cg.TFun(fg2cg_type(arg), cg.TSlio(latent, bottom, fg2cg_type(result)))
        case fg.TProd(left, right):
            return cg.TProd(fg2cg_type(left), fg2cg_type(right))
        case fg.TSum(left, right):
            return cg.TSum(fg2cg_type(left), fg2cg_type(right))
        case fg.TRef(payload):
            return cg.TRef(payload.label, fg2cg_type(payload.body))
    raise TranslationInvariantError(f"not an FG type: {t!r}")


def fg2cg_context(ctx: Mapping[str, fg.FGType]) -> dict:
    return {x: fg2cg_type(t) for x, t in ctx.items()}


# ---------------------------------------------------------------------------
# coerce_taint
# ---------------------------------------------------------------------------

def coerce_taint_wrap(m: cg.CGExpr, m_type: cg.TSlio, names: Optional[FreshNames] = None) -> cg.CGExpr:
    """
    Apply ``coerce_taint`` to ``m``, lowering its taint to ⊥.

    ``m_type`` is the type ``SLIO pc ℓ (Labeled ℓ' τ')`` at which ``m`` is
    used; it becomes the annotation of the coercion's parameter. The result
    has type ``SLIO pc ⊥ (Labeled ℓ' τ')``.

    Raises:
        TranslationInvariantError: the payload is not labeled, or ℓ ⋢ ℓ'
    """
    if not isinstance(m_type, cg.TSlio) or not isinstance(m_type.result, cg.TLabeled):
        raise TranslationInvariantError(f"coerce_taint needs a labeled payload, got {m_type!r}")
    if not m_type.taint.leq(m_type.result.label):
        raise TranslationInvariantError(
            f"coerce_taint precondition violated: taint {m_type.taint} "
            f"is not below payload label {m_type.result.label}"
        )
    names = names or FreshNames(cg.variables(m))
    x, y = names.fresh("x"), names.fresh("y")
    coerce = cg.Lam(x, m_type, cg.ToLabeled(cg.Bind(cg.Var(x), y, cg.Unlabel(cg.Var(y)))))
    return cg.App(coerce, m)


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

def fg2cg_expr(ctx: Mapping[str, fg.FGType], pc: Label, e: fg.FGExpr) -> TransResult:
    """
    Translate a well-typed FG expression.

    Raises:
        FGTypeError: the source does not typecheck under (ctx, pc)
        TranslationInvariantError: an internal precondition failed
    """
    source_type = fg_typecheck(ctx, pc, e)
    names = FreshNames(fg.variables(e) | set(ctx))
    target = _FG2CG(names).trans(dict(ctx), pc, e)
    target_type = cg.TSlio(pc, pc.lattice.bottom, fg2cg_type(source_type))
    logger.info(f"fg2cg translated {fg.size(e)} source nodes into {cg.size(target)} target nodes")
    return TransResult(target, source_type, target_type)


def fg2cg_check(ctx: Mapping[str, fg.FGType], pc: Label, result: TransResult) -> cg.CGType:
    """
    Re-typecheck a translation and confirm its type is below the promised one.

    Raises:
        TranslationInvariantError: the target is ill-typed or its type is too large
    """
    try:
        actual = cg_typecheck(fg2cg_context(ctx), result.target, pc.lattice)
    except IFCError as exc:
        raise TranslationInvariantError(f"translated term does not typecheck: {exc}") from exc
    if not cg_subtype(actual, result.target_type):
        raise TranslationInvariantError(
            f"translated term has type {pretty_cg_type(actual)}, "
            f"expected a subtype of {pretty_cg_type(result.target_type)}"
        )
    return actual


class _FG2CG:
    def __init__(self, names: FreshNames):
        self.names = names

    def _coerce(self, m: cg.CGExpr, pc: Label, taint: Label, result: fg.FGType) -> cg.CGExpr:
        return coerce_taint_wrap(m, cg.TSlio(pc, taint, fg2cg_type(result)), self.names)

    def trans(self, ctx: dict, pc: Label, e: fg.FGExpr) -> cg.CGExpr:
        bot = pc.lattice.bottom
        fresh = self.names.fresh
        match e:
            case fg.Var(name):
                return cg.Ret(cg.Var(name))

            case fg.UnitLit():
                return cg.Ret(cg.LabelE(bot, cg.UnitLit()))

            case fg.BoolLit(value):
                return cg.Ret(cg.LabelE(bot, cg.BoolLit(value)))

            case fg.Lam(param, param_type, latent, body):
                body_t = self.trans({**ctx, param: param_type}, latent, body)
                return cg.Ret(cg.LabelE(bot, cg.Lam(param, fg2cg_type(param_type), body_t)))

            case fg.App(fn, arg):
                fn_label = fg_typecheck(ctx, pc, fn).label
                a, b, c = fresh("a"), fresh("b"), fresh("c")
                m = cg.Bind(
                    self.trans(ctx, pc, fn), a,
                    cg.Bind(
                        self.trans(ctx, pc, arg), b,
                        cg.Bind(cg.Unlabel(cg.Var(a)), c, cg.App(cg.Var(c), cg.Var(b))),
                    ),
                )
                return self._coerce(m, pc, fn_label, fg_typecheck(ctx, pc, e))

            case fg.Pair(left, right):
                a, b = fresh("a"), fresh("b")
                return cg.Bind(
                    self.trans(ctx, pc, left), a,
                    cg.Bind(
                        self.trans(ctx, pc, right), b,
                        cg.Ret(cg.LabelE(bot, cg.Pair(cg.Var(a), cg.Var(b)))),
                    ),
                )

            case fg.Fst(inner) | fg.Snd(inner):
                label = fg_typecheck(ctx, pc, inner).label
                project = cg.Fst if isinstance(e, fg.Fst) else cg.Snd
                a, b = fresh("a"), fresh("b")
                m = cg.Bind(
                    self.trans(ctx, pc, inner), a,
                    cg.Bind(cg.Unlabel(cg.Var(a)), b, cg.Ret(project(cg.Var(b)))),
                )
                return self._coerce(m, pc, label, fg_typecheck(ctx, pc, e))

            case fg.Inl(annotation, inner) | fg.Inr(annotation, inner):
                inject = cg.Inl if isinstance(e, fg.Inl) else cg.Inr
                a = fresh("a")
                return cg.Bind(
                    self.trans(ctx, pc, inner), a,
                    cg.Ret(cg.LabelE(bot, inject(fg2cg_type(annotation), cg.Var(a)))),
                )

            case fg.Case(scrutinee, left_var, left, right_var, right):
                scrut_t = fg_typecheck(ctx, pc, scrutinee)
                inner_pc = pc.join(scrut_t.label)
                # Second branch binds right_var at the right summand.
                left_t = self.trans({**ctx, left_var: scrut_t.body.left}, inner_pc, left)
                right_t = self.trans({**ctx, right_var: scrut_t.body.right}, inner_pc, right)
                a, b = fresh("a"), fresh("b")
                m = cg.Bind(
                    self.trans(ctx, pc, scrutinee), a,
                    cg.Bind(cg.Unlabel(cg.Var(a)), b, cg.Case(cg.Var(b), left_var, left_t, right_var, right_t)),
                )
                return self._coerce(m, pc, scrut_t.label, fg_typecheck(ctx, pc, e))

            case fg.If(cond, then, orelse):
                cond_t = fg_typecheck(ctx, pc, cond)
                inner_pc = pc.join(cond_t.label)
                then_t = self.trans(ctx, inner_pc, then)
                else_t = self.trans(ctx, inner_pc, orelse)
                a, b = fresh("a"), fresh("b")
                m = cg.Bind(
                    self.trans(ctx, pc, cond), a,
                    cg.Bind(cg.Unlabel(cg.Var(a)), b, cg.If(cg.Var(b), then_t, else_t)),
                )
                return self._coerce(m, pc, cond_t.label, fg_typecheck(ctx, pc, e))

            case fg.Let(var, bound, body):
                bound_type = fg_typecheck(ctx, pc, bound)
                return cg.Bind(self.trans(ctx, pc, bound), var, self.trans({**ctx, var: bound_type}, pc, body))

            case fg.Prim(op, args):
                operands = [fresh("a") for _ in args]
                unlabeled = [fresh("c") for _ in args]
                inner: cg.CGExpr = cg.Ret(cg.Prim(op, tuple(cg.Var(c) for c in unlabeled)))
                for a, c in reversed(list(zip(operands, unlabeled))):
                    inner = cg.Bind(cg.Unlabel(cg.Var(a)), c, inner)
                out: cg.CGExpr = cg.ToLabeled(inner)
                for a, arg in reversed(list(zip(operands, args))):
                    out = cg.Bind(self.trans(ctx, pc, arg), a, out)
                return out

            case fg.New(inner, annotation):
                payload = annotation if annotation is not None else fg_typecheck(ctx, pc, inner)
                a, r = fresh("a"), fresh("r")
                return cg.Bind(
                    self.trans(ctx, pc, inner), a,
                    cg.Bind(
                        cg.New(cg.Var(a), fg2cg_type(payload)), r,
                        cg.Ret(cg.LabelE(bot, cg.Var(r))),
                    ),
                )

            case fg.Deref(inner):
                ref_t = fg_typecheck(ctx, pc, inner)
                a, b = fresh("a"), fresh("b")
                m = cg.Bind(
                    self.trans(ctx, pc, inner), a,
                    cg.Bind(cg.Unlabel(cg.Var(a)), b, cg.Deref(cg.Var(b))),
                )
                return self._coerce(m, pc, ref_t.label, raise_label(ref_t.body.payload, ref_t.label))

            case fg.Assign(target, value):
                a, b, c, d = fresh("a"), fresh("b"), fresh("c"), fresh("d")
                write = cg.ToLabeled(cg.Bind(
                    self.trans(ctx, pc, target), a,
                    cg.Bind(
                        self.trans(ctx, pc, value), b,
                        cg.Bind(cg.Unlabel(cg.Var(a)), c, cg.Assign(cg.Var(c), cg.Var(b))),
                    ),
                ))
                return cg.Bind(write, d, cg.Ret(cg.LabelE(bot, cg.UnitLit())))

        raise TranslationInvariantError(f"not an FG expression: {e!r}")
