"""
Subtyping, protection and type join/meet for FG.

Labels are covariant at the top of every type, products and sums are
covariant, functions are contravariant in argument and latent label, and
references are invariant in their payload.
"""
from typing import Optional

from ..core.lattice import Label
from .syntax import FGType, FGUnlabeledType, TBool, TFun, TProd, TRef, TSum, TUnit


def protected(t: FGType, label: Label) -> bool:
    """``t ↘ label``: the top-level label of ``t`` is at least ``label``."""
    return label.leq(t.label)


def raise_label(t: FGType, label: Label) -> FGType:
    """Join ``label`` into the top-level label of ``t``."""
    return FGType(t.body, t.label.join(label))


def fg_subtype(t1: FGType, t2: FGType) -> bool:
    return t1.label.leq(t2.label) and unlabeled_subtype(t1.body, t2.body)


def unlabeled_subtype(a1: FGUnlabeledType, a2: FGUnlabeledType) -> bool:
    match a1, a2:
        case TBool(), TBool():
            return True
        case TUnit(), TUnit():
            return True
        case TFun(arg1, latent1, res1), TFun(arg2, latent2, res2):
            return (
                fg_subtype(arg2, arg1)
                and latent2.leq(latent1)
                and fg_subtype(res1, res2)
            )
        case TProd(l1, r1), TProd(l2, r2):
            return fg_subtype(l1, l2) and fg_subtype(r1, r2)
        case TSum(l1, r1), TSum(l2, r2):
            return fg_subtype(l1, l2) and fg_subtype(r1, r2)
        case TRef(p1), TRef(p2):
            return p1 == p2
    return False


# ---------------------------------------------------------------------------
# Least upper / greatest lower bounds
# ---------------------------------------------------------------------------

def join_types(t1: FGType, t2: FGType) -> Optional[FGType]:
    """Least common supertype, or None when the shapes disagree."""
    body = _bound(t1.body, t2.body, upper=True)
    return None if body is None else FGType(body, t1.label.join(t2.label))


def meet_types(t1: FGType, t2: FGType) -> Optional[FGType]:
    """Greatest common subtype, or None when the shapes disagree."""
    body = _bound(t1.body, t2.body, upper=False)
    return None if body is None else FGType(body, t1.label.meet(t2.label))


def _bound(a1: FGUnlabeledType, a2: FGUnlabeledType, upper: bool) -> Optional[FGUnlabeledType]:
    same = join_types if upper else meet_types
    dual = meet_types if upper else join_types
    match a1, a2:
        case TBool(), TBool():
            return a1
        case TUnit(), TUnit():
            return a1
        case TFun(arg1, latent1, res1), TFun(arg2, latent2, res2):
            arg = dual(arg1, arg2)
            res = same(res1, res2)
            if arg is None or res is None:
                return None
            latent = latent1.meet(latent2) if upper else latent1.join(latent2)
            return TFun(arg, latent, res)
        case TProd(l1, r1), TProd(l2, r2):
            left, right = same(l1, l2), same(r1, r2)
            return None if left is None or right is None else TProd(left, right)
        case TSum(l1, r1), TSum(l2, r2):
            left, right = same(l1, l2), same(r1, r2)
            return None if left is None or right is None else TSum(left, right)
        case TRef(p1), TRef(p2):
            return a1 if p1 == p2 else None
    return None
