"""
Algorithmic typechecker for FG: ``Γ ⊢_pc e : τ``.

The checker synthesizes principal types. Subsumption is applied only at
elimination sites (arguments, assigned values, annotated allocations), and
every "result protected at ℓ" premise is realized by raising the result's
top-level label by ℓ. Introduction forms produce types labeled ⊥.

``let`` checks the body under the bound type; boolean primitives join the
labels of their operands; annotated ``new`` checks its initializer against
the annotation before the protection premise.
"""
import logging
from dataclasses import dataclass
from typing import Mapping

from ..core.errors import FGTypeError
from ..core.lattice import Label
from ..surface.printer import pretty_fg_type
from .subtyping import fg_subtype, join_types, protected, raise_label
from .syntax import (
    App, Assign, BoolLit, Case, Deref, FGExpr, FGType, Fst, If, Inl, Inr, Lam,
    Let, New, Pair, Prim, PRIM_ARITY, Snd, TBool, TFun, TProd, TRef, TSum, TUnit,
    UnitLit, Var,
)

logger = logging.getLogger(__name__)


def fg_typecheck(ctx: Mapping[str, FGType], pc: Label, e: FGExpr) -> FGType:
    """
    Synthesize the principal type of ``e`` under ``ctx`` at program counter ``pc``.

    Args:
        ctx: typing context
        pc: lower bound on the write effects of ``e``
        e: expression to check

    Returns:
        FGType: the minimal type derivable for ``e``

    Raises:
        FGTypeError: naming the rule whose premise failed
    """
    t = _FGChecker(pc.lattice.bottom).check(dict(ctx), pc, e)
    logger.debug(f"fg_typecheck pc={pc} -> {fg_show_type(t)}")
    return t


def fg_show_type(t: FGType) -> str:
    return pretty_fg_type(t)


@dataclass
class _FGChecker:
    bottom: Label

    def _expect_bool(self, rule: str, t: FGType, e: FGExpr) -> None:
        if not isinstance(t.body, TBool):
            raise FGTypeError(rule, f"expected a boolean, got {fg_show_type(t)}", e.pos)

    def _expect_sub(self, rule: str, actual: FGType, expected: FGType, e: FGExpr) -> None:
        if not fg_subtype(actual, expected):
            raise FGTypeError(
                rule,
                f"{fg_show_type(actual)} is not a subtype of {fg_show_type(expected)}",
                e.pos,
            )

    def _branch_join(self, rule: str, t1: FGType, t2: FGType, e: FGExpr) -> FGType:
        joined = join_types(t1, t2)
        if joined is None:
            raise FGTypeError(
                rule,
                f"branch types {fg_show_type(t1)} and {fg_show_type(t2)} have no common supertype",
                e.pos,
            )
        return joined

    def check(self, ctx: dict, pc: Label, e: FGExpr) -> FGType:
        bot = self.bottom
        match e:
            case Var(name):
                if name not in ctx:
                    raise FGTypeError("FG-var", f"unbound variable '{name}'", e.pos)
                return ctx[name]

            case UnitLit():
                return FGType(TUnit(), bot)

            case BoolLit():
                return FGType(TBool(), bot)

            case Lam(param, param_type, latent, body):
                result = self.check({**ctx, param: param_type}, latent, body)
                return FGType(TFun(param_type, latent, result), bot)

            case App(fn, arg):
                fn_t = self.check(ctx, pc, fn)
                if not isinstance(fn_t.body, TFun):
                    raise FGTypeError("FG-app", f"applying a non-function of type {fg_show_type(fn_t)}", e.pos)
                arg_t = self.check(ctx, pc, arg)
                self._expect_sub("FG-app", arg_t, fn_t.body.arg, arg)
                # ℓ ⊔ pc ⊑ ℓe
                if not fn_t.label.join(pc).leq(fn_t.body.latent):
                    raise FGTypeError(
                        "FG-app",
                        f"function label {fn_t.label} joined with pc {pc} is not below "
                        f"its latent effect label {fn_t.body.latent}",
                        e.pos,
                    )
                return raise_label(fn_t.body.result, fn_t.label)

            case Pair(left, right):
                return FGType(TProd(self.check(ctx, pc, left), self.check(ctx, pc, right)), bot)

            case Fst(inner) | Snd(inner):
                rule = "FG-fst" if isinstance(e, Fst) else "FG-snd"
                t = self.check(ctx, pc, inner)
                if not isinstance(t.body, TProd):
                    raise FGTypeError(rule, f"projection from non-product {fg_show_type(t)}", e.pos)
                component = t.body.left if isinstance(e, Fst) else t.body.right
                return raise_label(component, t.label)

            case Inl(annotation, inner) | Inr(annotation, inner):
                rule = "FG-inl" if isinstance(e, Inl) else "FG-inr"
                t = self.check(ctx, pc, inner)
                expected = annotation.left if isinstance(e, Inl) else annotation.right
                self._expect_sub(rule, t, expected, inner)
                return FGType(annotation, bot)

            case Case(scrutinee, left_var, left, right_var, right):
                t = self.check(ctx, pc, scrutinee)
                if not isinstance(t.body, TSum):
                    raise FGTypeError("FG-case", f"case on non-sum {fg_show_type(t)}", e.pos)
                inner_pc = pc.join(t.label)
                t1 = self.check({**ctx, left_var: t.body.left}, inner_pc, left)
                t2 = self.check({**ctx, right_var: t.body.right}, inner_pc, right)
                return raise_label(self._branch_join("FG-case", t1, t2, e), t.label)

            case If(cond, then, orelse):
                t = self.check(ctx, pc, cond)
                self._expect_bool("FG-if", t, cond)
                inner_pc = pc.join(t.label)
                t1 = self.check(ctx, inner_pc, then)
                t2 = self.check(ctx, inner_pc, orelse)
                return raise_label(self._branch_join("FG-if", t1, t2, e), t.label)

            case Let(var, bound, body):
                t1 = self.check(ctx, pc, bound)
                return self.check({**ctx, var: t1}, pc, body)

            case Prim(op, args):
                if PRIM_ARITY.get(op) != len(args):
                    raise FGTypeError("FG-prim", f"'{op}' is not a primitive of arity {len(args)}", e.pos)
                label = bot
                for a in args:
                    t = self.check(ctx, pc, a)
                    self._expect_bool("FG-prim", t, a)
                    label = label.join(t.label)
                return FGType(TBool(), label)

            case New(inner, annotation):
                t = self.check(ctx, pc, inner)
                payload = t
                if annotation is not None:
                    self._expect_sub("FG-new", t, annotation, inner)
                    payload = annotation
                if not protected(payload, pc):
                    raise FGTypeError(
                        "FG-new",
                        f"cell contents {fg_show_type(payload)} are not protected at pc {pc}",
                        e.pos,
                    )
                return FGType(TRef(payload), bot)

            case Deref(inner):
                t = self.check(ctx, pc, inner)
                if not isinstance(t.body, TRef):
                    raise FGTypeError("FG-deref", f"dereferencing non-reference {fg_show_type(t)}", e.pos)
                return raise_label(t.body.payload, t.label)

            case Assign(target, value):
                t = self.check(ctx, pc, target)
                if not isinstance(t.body, TRef):
                    raise FGTypeError("FG-assign", f"assigning through non-reference {fg_show_type(t)}", e.pos)
                payload = t.body.payload
                v = self.check(ctx, pc, value)
                self._expect_sub("FG-assign", v, payload, value)
                bound = pc.join(t.label)
                if not protected(payload, bound):
                    raise FGTypeError(
                        "FG-assign",
                        f"cell contents {fg_show_type(payload)} are not protected at pc ⊔ ℓ = {bound}",
                        e.pos,
                    )
                return FGType(TUnit(), bot)

        raise FGTypeError("FG-syntax", f"not an FG expression: {e!r}", getattr(e, "pos", None))
