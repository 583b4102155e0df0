"""
Inhabitants of FG and CG types, used as secrets and as default environments.

Functions are generated as constant closures and references as freshly
allocated cells holding an inhabitant of the payload, so every value is
closed and well-typed by construction.
"""
import random
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from ..cg import syntax as cg
from ..cg.evaluator import LabeledV, RetThunk
from ..core.errors import GenerationError
from ..core.heap import Heap
from ..core.values import BoolV, Closure, InlV, InrV, PairV, UnitV
from ..fg import syntax as fg

Seed = Union[int, random.Random]

# Distinct secrets are retried this many times before accepting equal ones
_DISTINCT_TRIES = 8


def _rng(seed: Seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def gen_value(t: Any, seed: Seed, heap: Optional[Heap] = None) -> Any:
    """
    Generate a closed value of type ``t`` (an FG or a CG type).

    Args:
        t: FGType, FG unlabeled type or CG type
        seed: integer seed or a ``random.Random`` to draw from
        heap: receives the cells allocated for reference types

    Raises:
        GenerationError: ``t`` is a reference type and no heap was given
    """
    return _ValueGen(_rng(seed), heap).value(t)


def gen_distinct(t: Any, rng: random.Random, heap: Heap, other: Any) -> Any:
    """Generate a value of ``t`` that prints differently from ``other`` when the type allows it."""
    candidate = gen_value(t, rng, heap)
    for _ in range(_DISTINCT_TRIES):
        if str(candidate) != str(other):
            break
        candidate = gen_value(t, rng, heap)
    return candidate


def default_env(ctx: Mapping[str, Any], seed: Seed = 0) -> Tuple[Heap, Dict[str, Any]]:
    """
    Instantiate every context variable with a generated inhabitant.

    Returns:
        (heap, env): the heap holds the cells allocated for reference variables
    """
    rng, heap = _rng(seed), Heap()
    env = {x: gen_value(t, rng, heap) for x, t in ctx.items()}
    return heap, env


class _ValueGen:
    def __init__(self, rng: random.Random, heap: Optional[Heap]):
        self.rng = rng
        self.heap = heap

    def _alloc(self, v: Any):
        if self.heap is None:
            raise GenerationError("reference values need a heap to allocate into")
        return self.heap.alloc(v)

    def _constant(self, var_cls, result: Any) -> Closure:
        return Closure({"k": self.value(result)}, "_", var_cls("k"))

    def value(self, t: Any) -> Any:
        if isinstance(t, fg.FGType):
            t = t.body
        match t:
            case fg.TBool() | cg.TBool():
                return BoolV(self.rng.random() < 0.5)
            case fg.TUnit() | cg.TUnit():
                return UnitV()
            case fg.TProd(left, right) | cg.TProd(left, right):
                return PairV(self.value(left), self.value(right))
            case fg.TSum(left, right) | cg.TSum(left, right):
                if self.rng.random() < 0.5:
                    return InlV(self.value(left))
                return InrV(self.value(right))
            case fg.TFun(result=result):
                return self._constant(fg.Var, result)
            case cg.TFun(result=result):
                return self._constant(cg.Var, result)
            case fg.TRef(payload):
                return self._alloc(self.value(payload))
            case cg.TRef(payload=payload):
                return self._alloc(LabeledV(self.value(payload)))
            case cg.TLabeled(payload=payload):
                return LabeledV(self.value(payload))
            case cg.TSlio(result=result):
                return RetThunk(self.value(result))
        raise GenerationError(f"cannot generate a value of {t!r}")


# ---------------------------------------------------------------------------
# CG values under the CG-to-FG coding
# ---------------------------------------------------------------------------

def encode_cg_value(v: Any) -> Any:
    """
    The FG image of a generated CG value: ``Labeled`` payloads become
    ``inl`` and constant computations become thunks returning ``inl``.

    Raises:
        GenerationError: ``v`` is a closure or computation not built by this module
    """
    match v:
        case LabeledV(payload):
            return InlV(encode_cg_value(payload))
        case PairV(left, right):
            return PairV(encode_cg_value(left), encode_cg_value(right))
        case InlV(inner):
            return InlV(encode_cg_value(inner))
        case InrV(inner):
            return InrV(encode_cg_value(inner))
        case RetThunk(value):
            return Closure({"k": InlV(encode_cg_value(value))}, "_", fg.Var("k"))
        case Closure(env, "_", cg.Var("k")):
            return Closure({"k": encode_cg_value(env["k"])}, "_", fg.Var("k"))
        case Closure() | RetThunk():
            raise GenerationError(f"cannot encode {v!r}")
    return v


def encoded_env(ctx: Mapping[str, Any], seed: Seed = 0) -> Tuple[Heap, Dict[str, Any]]:
    """Like ``default_env`` over a CG context, with heap and values moved to the FG coding."""
    heap, env = default_env(ctx, seed)
    for loc, v in heap.items():
        heap.store(loc, encode_cg_value(v))
    return heap, {x: encode_cg_value(v) for x, v in env.items()}
