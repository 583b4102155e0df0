"""
Subtyping and type join/meet for CG.

``Labeled`` is covariant in label and payload; ``SLIO`` is contravariant in
its pc-label and covariant in taint and result; references are invariant.
"""
from typing import Optional

from .syntax import CGType, TBool, TFun, TLabeled, TProd, TRef, TSlio, TSum, TUnit


def cg_subtype(t1: CGType, t2: CGType) -> bool:
    match t1, t2:
        case TBool(), TBool():
            return True
        case TUnit(), TUnit():
            return True
        case TFun(a1, r1), TFun(a2, r2):
            return cg_subtype(a2, a1) and cg_subtype(r1, r2)
        case TProd(l1, r1), TProd(l2, r2):
            return cg_subtype(l1, l2) and cg_subtype(r1, r2)
        case TSum(l1, r1), TSum(l2, r2):
            return cg_subtype(l1, l2) and cg_subtype(r1, r2)
        case TRef(), TRef():
            return t1 == t2
        case TLabeled(lab1, p1), TLabeled(lab2, p2):
            return lab1.leq(lab2) and cg_subtype(p1, p2)
        case TSlio(pc1, taint1, r1), TSlio(pc2, taint2, r2):
            return pc2.leq(pc1) and taint1.leq(taint2) and cg_subtype(r1, r2)
    return False


def join_types(t1: CGType, t2: CGType) -> Optional[CGType]:
    """Least common supertype, or None."""
    return _bound(t1, t2, upper=True)


def meet_types(t1: CGType, t2: CGType) -> Optional[CGType]:
    """Greatest common subtype, or None."""
    return _bound(t1, t2, upper=False)


def _bound(t1: CGType, t2: CGType, upper: bool) -> Optional[CGType]:
    same = join_types if upper else meet_types
    dual = meet_types if upper else join_types

    def up(a, b):
        return a.join(b) if upper else a.meet(b)

    def down(a, b):
        return a.meet(b) if upper else a.join(b)

    match t1, t2:
        case TBool(), TBool():
            return t1
        case TUnit(), TUnit():
            return t1
        case TFun(a1, r1), TFun(a2, r2):
            arg, res = dual(a1, a2), same(r1, r2)
            return None if arg is None or res is None else TFun(arg, res)
        case TProd(l1, r1), TProd(l2, r2):
            left, right = same(l1, l2), same(r1, r2)
            return None if left is None or right is None else TProd(left, right)
        case TSum(l1, r1), TSum(l2, r2):
            left, right = same(l1, l2), same(r1, r2)
            return None if left is None or right is None else TSum(left, right)
        case TRef(), TRef():
            return t1 if t1 == t2 else None
        case TLabeled(lab1, p1), TLabeled(lab2, p2):
            payload = same(p1, p2)
            return None if payload is None else TLabeled(up(lab1, lab2), payload)
        case TSlio(pc1, taint1, r1), TSlio(pc2, taint2, r2):
            result = same(r1, r2)
            if result is None:
                return None
            return TSlio(down(pc1, pc2), up(taint1, taint2), result)
    return None
