"""
Pieces shared by the FG evaluator and the CG evaluator/forcing semantics.
"""
import sys
from dataclasses import dataclass
from typing import Any, List

from .config import EvalConfig
from .errors import EvalTimeout, StuckError
from .heap import Heap


@dataclass
class EvalResult:
    """Outcome of a terminating run."""

    heap: Heap
    value: Any
    steps: int
    # Entries into right branches of case nodes marked ``dead_right``
    dead_branch_hits: int = 0


class StepCounter:
    """Fuel accounting; one counter per run."""

    def __init__(self, fuel: int):
        self.fuel = fuel
        self.steps = 0

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.fuel:
            raise EvalTimeout(self.steps - 1)


def ensure_recursion_headroom() -> None:
    if sys.getrecursionlimit() < EvalConfig.MAX_DEPTH:
        sys.setrecursionlimit(EvalConfig.MAX_DEPTH)


def resolve_fuel(fuel) -> int:
    fuel = EvalConfig.FUEL if fuel is None else fuel
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    return fuel


def apply_prim(op: str, args: List[bool]) -> bool:
    if op == "and":
        return args[0] and args[1]
    if op == "or":
        return args[0] or args[1]
    if op == "not":
        return not args[0]
    raise StuckError(f"unknown primitive '{op}'")
