"""
Runtime values common to both languages.

Labels are erased at runtime; only the CG ``Labeled`` wrapper survives
(see ``app.ifc.cg.evaluator``).
"""
from dataclasses import dataclass
from typing import Any, Dict, Optional

from .heap import Loc


@dataclass(frozen=True)
class UnitV:
    def __str__(self) -> str:
        return "()"


@dataclass(frozen=True)
class BoolV:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class PairV:
    left: Any
    right: Any

    def __str__(self) -> str:
        return f"(pair {self.left} {self.right})"


@dataclass(frozen=True)
class InlV:
    value: Any

    def __str__(self) -> str:
        return f"(inl {self.value})"


@dataclass(frozen=True)
class InrV:
    value: Any

    def __str__(self) -> str:
        return f"(inr {self.value})"


@dataclass(frozen=True, eq=False)
class Closure:
    """Function value; compares by identity."""

    env: Dict[str, Any]
    param: str
    body: Any
    # pc label the body runs at, for FG lambdas; None for CG functions
    latent: Optional[Any] = None

    def __str__(self) -> str:
        return "<closure>"


__all__ = ["UnitV", "BoolV", "PairV", "InlV", "InrV", "Closure", "Loc"]
