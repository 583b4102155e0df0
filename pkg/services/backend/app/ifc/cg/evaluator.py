"""
Pure evaluation and forcing semantics for CG.

Pure evaluation never touches the heap: monadic constructs evaluate their
pure subexpressions and return a thunk. Forcing a thunk performs its reads
and writes. Both phases draw from one fuel budget and use the FG step
convention.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

from ..core.errors import EvalTimeout, StuckError
from ..core.heap import Heap, Loc
from ..core.values import BoolV, Closure, InlV, InrV, PairV, UnitV
from ..core.runtime import EvalResult, StepCounter, apply_prim, ensure_recursion_headroom, resolve_fuel
from .syntax import (
    App, Assign, Bind, BoolLit, Case, CGExpr, Deref, Fst, If, Inl, Inr, LabelE,
    Lam, Let, New, Pair, Prim, Ret, Snd, ToLabeled, UnitLit, Unlabel, Var,
)

logger = logging.getLogger(__name__)

CGValue = Any
Env = Dict[str, CGValue]


@dataclass(frozen=True)
class LabeledV:
    """Runtime form of a ``Labeled`` value; the label itself is erased."""

    payload: CGValue

    def __str__(self) -> str:
        return f"(labeled {self.payload})"


# ---------------------------------------------------------------------------
# Suspended computations
# ---------------------------------------------------------------------------

class Thunk:
    """Base class of suspended monadic computations."""

    def __str__(self) -> str:
        return "<computation>"


@dataclass(frozen=True, eq=False)
class RetThunk(Thunk):
    value: CGValue


@dataclass(frozen=True, eq=False)
class BindThunk(Thunk):
    comp: Thunk
    env: Env
    var: str
    body: CGExpr


@dataclass(frozen=True, eq=False)
class UnlabelThunk(Thunk):
    labeled: LabeledV


@dataclass(frozen=True, eq=False)
class ToLabeledThunk(Thunk):
    comp: Thunk


@dataclass(frozen=True, eq=False)
class NewThunk(Thunk):
    labeled: LabeledV


@dataclass(frozen=True, eq=False)
class DerefThunk(Thunk):
    loc: Loc


@dataclass(frozen=True, eq=False)
class AssignThunk(Thunk):
    loc: Loc
    labeled: LabeledV


def _expect(value: CGValue, kind: type, what: str) -> Any:
    if not isinstance(value, kind):
        raise StuckError(f"{what}: expected {kind.__name__}, got {value}")
    return value


class _CGMachine:
    def __init__(self, heap: Heap, counter: StepCounter):
        self.heap = heap
        self.counter = counter

    # -- pure evaluation ----------------------------------------------------

    def eval(self, e: CGExpr, env: Env) -> CGValue:
        match e:
            case Var(name):
                try:
                    return env[name]
                except KeyError:
                    raise StuckError(f"unbound variable '{name}' at runtime") from None
            case UnitLit():
                return UnitV()
            case BoolLit(value):
                return BoolV(value)

        self.counter.tick()
        match e:
            case Lam(param=param, body=body):
                return Closure(env, param, body)
            case App(fn, arg):
                f = _expect(self.eval(fn, env), Closure, "application")
                v = self.eval(arg, env)
                return self.eval(f.body, {**f.env, f.param: v})
            case Pair(left, right):
                return PairV(self.eval(left, env), self.eval(right, env))
            case Fst(inner):
                return _expect(self.eval(inner, env), PairV, "fst").left
            case Snd(inner):
                return _expect(self.eval(inner, env), PairV, "snd").right
            case Inl(_, inner):
                return InlV(self.eval(inner, env))
            case Inr(_, inner):
                return InrV(self.eval(inner, env))
            case Case(scrutinee, left_var, left, right_var, right):
                v = self.eval(scrutinee, env)
                if isinstance(v, InlV):
                    return self.eval(left, {**env, left_var: v.value})
                if isinstance(v, InrV):
                    return self.eval(right, {**env, right_var: v.value})
                raise StuckError(f"case on non-injection {v}")
            case If(cond, then, orelse):
                v = _expect(self.eval(cond, env), BoolV, "if")
                return self.eval(then if v.value else orelse, env)
            case Let(var, bound, body):
                return self.eval(body, {**env, var: self.eval(bound, env)})
            case Prim(op, args):
                vals = [_expect(self.eval(a, env), BoolV, op).value for a in args]
                return BoolV(apply_prim(op, vals))
            case Ret(inner):
                return RetThunk(self.eval(inner, env))
            case Bind(comp, var, body):
                return BindThunk(_expect(self.eval(comp, env), Thunk, "bind"), env, var, body)
            case LabelE(_, inner):
                return LabeledV(self.eval(inner, env))
            case Unlabel(inner):
                return UnlabelThunk(_expect(self.eval(inner, env), LabeledV, "unlabel"))
            case ToLabeled(inner):
                return ToLabeledThunk(_expect(self.eval(inner, env), Thunk, "toLabeled"))
            case New(inner):
                return NewThunk(_expect(self.eval(inner, env), LabeledV, "new"))
            case Deref(inner):
                return DerefThunk(_expect(self.eval(inner, env), Loc, "deref"))
            case Assign(target, value):
                loc = _expect(self.eval(target, env), Loc, "assign")
                return AssignThunk(loc, _expect(self.eval(value, env), LabeledV, "assign"))

        raise StuckError(f"not a CG expression: {e!r}")

    # -- forcing ------------------------------------------------------------

    def force(self, m: CGValue) -> CGValue:
        self.counter.tick()
        match m:
            case RetThunk(value):
                return value
            case BindThunk(comp, env, var, body):
                v = self.force(comp)
                k = _expect(self.eval(body, {**env, var: v}), Thunk, "bind continuation")
                return self.force(k)
            case UnlabelThunk(labeled):
                return labeled.payload
            case ToLabeledThunk(comp):
                return LabeledV(self.force(comp))
            case NewThunk(labeled):
                return self.heap.alloc(labeled)
            case DerefThunk(loc):
                return self.heap.load(loc)
            case AssignThunk(loc, labeled):
                self.heap.store(loc, labeled)
                return UnitV()
        raise StuckError(f"forcing a non-computation {m}")


def _run(heap: Optional[Heap], fuel: Optional[int], action) -> EvalResult:
    fuel = resolve_fuel(fuel)
    ensure_recursion_headroom()
    machine = _CGMachine(Heap() if heap is None else heap.copy(), StepCounter(fuel))
    try:
        value = action(machine)
    except RecursionError:
        raise EvalTimeout(machine.counter.steps, reason="depth") from None
    return EvalResult(machine.heap, value, machine.counter.steps)


def cg_eval_pure(e: CGExpr, env: Optional[Env] = None, fuel: Optional[int] = None) -> CGValue:
    """
    Evaluate ``e`` without a heap; monadic expressions yield thunks.

    Raises:
        EvalTimeout: fuel exhausted
        StuckError: no rule applies
    """
    return _run(None, fuel, lambda mc: mc.eval(e, dict(env or {}))).value


def cg_force(heap: Optional[Heap], m: CGValue, fuel: Optional[int] = None) -> EvalResult:
    """
    Force the computation ``m`` against a copy of ``heap``.

    Raises:
        EvalTimeout: fuel exhausted
        StuckError: ``m`` is not a thunk, or forcing got stuck
    """
    if not isinstance(m, Thunk):
        raise StuckError(f"forcing a non-computation {m}")
    result = _run(heap, fuel, lambda mc: mc.force(m))
    logger.debug(f"cg_force finished in {result.steps} steps, heap size {len(result.heap)}")
    return result


def cg_run(
    heap: Optional[Heap],
    e: CGExpr,
    env: Optional[Env] = None,
    fuel: Optional[int] = None,
    force: bool = True,
) -> EvalResult:
    """Pure-evaluate ``e`` and, when it is a computation and ``force`` is set, force it; one fuel budget."""

    def action(mc: _CGMachine) -> CGValue:
        v = mc.eval(e, dict(env or {}))
        return mc.force(v) if force and isinstance(v, Thunk) else v

    return _run(heap, fuel, action)
