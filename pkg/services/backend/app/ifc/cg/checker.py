"""
Algorithmic typechecker for CG: ``Γ ⊢ e : τ``.

Simply-typed constructs follow the usual rules. The monadic rules:

    ret e                 SLIO ⊤ ⊥ τ
    bind(m, x. e)         m : SLIO ℓ1 ℓ2 τ, e : SLIO ℓ3 ℓ4 τ', ℓ2 ⊑ ℓ3
                          => SLIO (ℓ1 ⊓ ℓ3) (ℓ2 ⊔ ℓ4) τ'
    label ℓ e             Labeled ℓ τ
    unlabel e             e : Labeled ℓ τ => SLIO ⊤ ℓ τ
    toLabeled m           m : SLIO ℓ ℓ' τ => SLIO ℓ ⊥ (Labeled ℓ' τ)
    new e                 e : Labeled ℓ τ => SLIO ℓ ⊥ (ref ℓ τ)
    deref e               e : ref ℓ τ => SLIO ⊤ ⊥ (Labeled ℓ τ)
    assign r e            r : ref ℓ τ, e <: Labeled ℓ τ => SLIO ℓ ⊥ unit

Using ⊓ in bind picks the greatest pc-label the rule allows.
"""
import logging
from dataclasses import dataclass
from typing import Mapping, Optional

from ..core.config import default_lattice
from ..core.errors import CGTypeError
from ..core.lattice import Lattice
from ..surface.printer import pretty_cg_type
from .subtyping import cg_subtype, join_types
from .syntax import (
    App, Assign, Bind, BoolLit, Case, CGExpr, CGType, Deref, Fst, If, Inl, Inr,
    LabelE, Lam, Let, New, Pair, Prim, PRIM_ARITY, Ret, Snd, TBool, TFun, TLabeled, TProd,
    TRef, TSlio, TSum, TUnit, ToLabeled, UnitLit, Unlabel, Var,
)

logger = logging.getLogger(__name__)


def cg_typecheck(ctx: Mapping[str, CGType], e: CGExpr, lattice: Optional[Lattice] = None) -> CGType:
    """
    Synthesize the principal type of ``e`` under ``ctx``.

    Args:
        ctx: typing context
        e: expression to check
        lattice: lattice supplying ⊥ and ⊤ (defaults to the configured one)

    Raises:
        CGTypeError: naming the rule whose premise failed
    """
    lattice = lattice or default_lattice()
    t = _CGChecker(lattice).check(dict(ctx), e)
    logger.debug(f"cg_typecheck -> {cg_show_type(t)}")
    return t


def cg_show_type(t: CGType) -> str:
    return pretty_cg_type(t)


@dataclass
class _CGChecker:
    lattice: Lattice

    def _expect_sub(self, rule: str, actual: CGType, expected: CGType, e: CGExpr) -> None:
        if not cg_subtype(actual, expected):
            raise CGTypeError(
                rule,
                f"{cg_show_type(actual)} is not a subtype of {cg_show_type(expected)}",
                e.pos,
            )

    def _expect_slio(self, rule: str, t: CGType, e: CGExpr) -> TSlio:
        if not isinstance(t, TSlio):
            raise CGTypeError(rule, f"expected a computation, got {cg_show_type(t)}", e.pos)
        return t

    def _expect_ref(self, rule: str, t: CGType, e: CGExpr) -> TRef:
        if not isinstance(t, TRef):
            raise CGTypeError(rule, f"expected a reference, got {cg_show_type(t)}", e.pos)
        return t

    def _branch_join(self, rule: str, t1: CGType, t2: CGType, e: CGExpr) -> CGType:
        joined = join_types(t1, t2)
        if joined is None:
            raise CGTypeError(
                rule,
                f"branch types {cg_show_type(t1)} and {cg_show_type(t2)} have no common supertype",
                e.pos,
            )
        return joined

    def check(self, ctx: dict, e: CGExpr) -> CGType:
        bot, top = self.lattice.bottom, self.lattice.top
        match e:
            case Var(name):
                if name not in ctx:
                    raise CGTypeError("CG-var", f"unbound variable '{name}'", e.pos)
                return ctx[name]

            case UnitLit():
                return TUnit()

            case BoolLit():
                return TBool()

            case Lam(param, param_type, body):
                return TFun(param_type, self.check({**ctx, param: param_type}, body))

            case App(fn, arg):
                fn_t = self.check(ctx, fn)
                if not isinstance(fn_t, TFun):
                    raise CGTypeError("CG-app", f"applying a non-function of type {cg_show_type(fn_t)}", e.pos)
                self._expect_sub("CG-app", self.check(ctx, arg), fn_t.arg, arg)
                return fn_t.result

            case Pair(left, right):
                return TProd(self.check(ctx, left), self.check(ctx, right))

            case Fst(inner) | Snd(inner):
                rule = "CG-fst" if isinstance(e, Fst) else "CG-snd"
                t = self.check(ctx, inner)
                if not isinstance(t, TProd):
                    raise CGTypeError(rule, f"projection from non-product {cg_show_type(t)}", e.pos)
                return t.left if isinstance(e, Fst) else t.right

            case Inl(annotation, inner) | Inr(annotation, inner):
                rule = "CG-inl" if isinstance(e, Inl) else "CG-inr"
                expected = annotation.left if isinstance(e, Inl) else annotation.right
                self._expect_sub(rule, self.check(ctx, inner), expected, inner)
                return annotation

            case Case(scrutinee, left_var, left, right_var, right):
                t = self.check(ctx, scrutinee)
                if not isinstance(t, TSum):
                    raise CGTypeError("CG-case", f"case on non-sum {cg_show_type(t)}", e.pos)
                t1 = self.check({**ctx, left_var: t.left}, left)
                t2 = self.check({**ctx, right_var: t.right}, right)
                return self._branch_join("CG-case", t1, t2, e)

            case If(cond, then, orelse):
                t = self.check(ctx, cond)
                if not isinstance(t, TBool):
                    raise CGTypeError("CG-if", f"expected a boolean, got {cg_show_type(t)}", cond.pos)
                return self._branch_join("CG-if", self.check(ctx, then), self.check(ctx, orelse), e)

            case Let(var, bound, body):
                return self.check({**ctx, var: self.check(ctx, bound)}, body)

            case Prim(op, args):
                if PRIM_ARITY.get(op) != len(args):
                    raise CGTypeError("CG-prim", f"'{op}' is not a primitive of arity {len(args)}", e.pos)
                for a in args:
                    t = self.check(ctx, a)
                    if not isinstance(t, TBool):
                        raise CGTypeError("CG-prim", f"expected a boolean, got {cg_show_type(t)}", a.pos)
                return TBool()

            case Ret(inner):
                return TSlio(top, bot, self.check(ctx, inner))

            case Bind(comp, var, body):
                m = self._expect_slio("CG-bind", self.check(ctx, comp), comp)
                k = self._expect_slio("CG-bind", self.check({**ctx, var: m.result}, body), body)
                if not m.taint.leq(k.pc):
                    raise CGTypeError(
                        "CG-bind",
                        f"taint {m.taint} of the first computation is not below "
                        f"the pc-label {k.pc} of the continuation",
                        e.pos,
                    )
                return TSlio(m.pc.meet(k.pc), m.taint.join(k.taint), k.result)

            case LabelE(label, inner):
                return TLabeled(label, self.check(ctx, inner))

            case Unlabel(inner):
                t = self.check(ctx, inner)
                if not isinstance(t, TLabeled):
                    raise CGTypeError("CG-unlabel", f"unlabeling a non-labeled {cg_show_type(t)}", e.pos)
                return TSlio(top, t.label, t.payload)

            case ToLabeled(inner):
                m = self._expect_slio("CG-toLabeled", self.check(ctx, inner), inner)
                return TSlio(m.pc, bot, TLabeled(m.taint, m.result))

            case New(inner, annotation):
                t = self.check(ctx, inner)
                if annotation is not None:
                    self._expect_sub("CG-ref", t, annotation, inner)
                    t = annotation
                if not isinstance(t, TLabeled):
                    raise CGTypeError("CG-ref", f"cell contents must be Labeled, got {cg_show_type(t)}", e.pos)
                return TSlio(t.label, bot, TRef(t.label, t.payload))

            case Deref(inner):
                r = self._expect_ref("CG-deref", self.check(ctx, inner), inner)
                return TSlio(top, bot, TLabeled(r.label, r.payload))

            case Assign(target, value):
                r = self._expect_ref("CG-assign", self.check(ctx, target), target)
                self._expect_sub("CG-assign", self.check(ctx, value), TLabeled(r.label, r.payload), value)
                return TSlio(r.label, bot, TUnit())

        raise CGTypeError("CG-syntax", f"not a CG expression: {e!r}", getattr(e, "pos", None))
