"""
Big-step call-by-value evaluator for FG: ``(H, e) ⇓ʲ (H', v)``.

Labels are erased at runtime. Closures capture an environment. Every rule
instance costs one step plus the cost of its premises; literals and
variables are free.
"""
import logging
from typing import Any, Dict, Optional

from ..core.errors import EvalTimeout, StuckError
from ..core.heap import Heap, Loc
from ..core.runtime import EvalResult, StepCounter, apply_prim, ensure_recursion_headroom, resolve_fuel
from ..core.values import BoolV, Closure, InlV, InrV, PairV, UnitV
from .syntax import (
    App, Assign, BoolLit, Case, Deref, FGExpr, Fst, If, Inl, Inr, Lam, Let, New,
    Pair, Prim, Snd, UnitLit, Var,
)

logger = logging.getLogger(__name__)

FGValue = Any
Env = Dict[str, FGValue]


class _FGMachine:
    def __init__(self, heap: Heap, counter: StepCounter):
        self.heap = heap
        self.counter = counter
        self.dead_branch_hits = 0

    def eval(self, e: FGExpr, env: Env) -> FGValue:
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
            case Lam(param=param, latent=latent, body=body):
                return Closure(env, param, body, latent)

            case App(fn, arg):
                f = self.eval(fn, env)
                v = self.eval(arg, env)
                if not isinstance(f, Closure):
                    raise StuckError(f"applying non-closure {f}")
                return self.eval(f.body, {**f.env, f.param: v})

            case Pair(left, right):
                return PairV(self.eval(left, env), self.eval(right, env))

            case Fst(inner) | Snd(inner):
                v = self.eval(inner, env)
                if not isinstance(v, PairV):
                    raise StuckError(f"projection from non-pair {v}")
                return v.left if isinstance(e, Fst) else v.right

            case Inl(_, inner):
                return InlV(self.eval(inner, env))

            case Inr(_, inner):
                return InrV(self.eval(inner, env))

            case Case(scrutinee, left_var, left, right_var, right):
                v = self.eval(scrutinee, env)
                if isinstance(v, InlV):
                    return self.eval(left, {**env, left_var: v.value})
                if isinstance(v, InrV):
                    if e.dead_right:
                        self.dead_branch_hits += 1
                        logger.warning(f"entered dead right branch of case at {e.pos}")
                    return self.eval(right, {**env, right_var: v.value})
                raise StuckError(f"case on non-injection {v}")

            case If(cond, then, orelse):
                v = self.eval(cond, env)
                if not isinstance(v, BoolV):
                    raise StuckError(f"if on non-boolean {v}")
                return self.eval(then if v.value else orelse, env)

            case Let(var, bound, body):
                return self.eval(body, {**env, var: self.eval(bound, env)})

            case Prim(op, args):
                vals = [self.eval(a, env) for a in args]
                if not all(isinstance(v, BoolV) for v in vals):
                    raise StuckError(f"primitive '{op}' on non-booleans")
                return BoolV(apply_prim(op, [v.value for v in vals]))

            case New(inner):
                return self.heap.alloc(self.eval(inner, env))

            case Deref(inner):
                loc = self.eval(inner, env)
                if not isinstance(loc, Loc):
                    raise StuckError(f"dereferencing non-location {loc}")
                return self.heap.load(loc)

            case Assign(target, value):
                loc = self.eval(target, env)
                v = self.eval(value, env)
                if not isinstance(loc, Loc):
                    raise StuckError(f"assigning through non-location {loc}")
                self.heap.store(loc, v)
                return UnitV()

        raise StuckError(f"not an FG expression: {e!r}")


def fg_eval(
    heap: Optional[Heap],
    e: FGExpr,
    env: Optional[Env] = None,
    fuel: Optional[int] = None,
) -> EvalResult:
    """
    Evaluate ``e`` starting from ``heap``. The input heap is not modified.

    Raises:
        EvalTimeout: fuel or recursion head-room exhausted
        StuckError: no rule applies (the program was not well-typed)
    """
    fuel = resolve_fuel(fuel)
    ensure_recursion_headroom()
    machine = _FGMachine(Heap() if heap is None else heap.copy(), StepCounter(fuel))
    try:
        value = machine.eval(e, dict(env or {}))
    except RecursionError:
        raise EvalTimeout(machine.counter.steps, reason="depth") from None
    logger.debug(f"fg_eval finished in {machine.counter.steps} steps, heap size {len(machine.heap)}")
    return EvalResult(machine.heap, value, machine.counter.steps, machine.dead_branch_hits)
