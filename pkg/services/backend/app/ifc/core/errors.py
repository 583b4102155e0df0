"""
Exception hierarchy shared by the typecheckers, evaluators, translators and harness.
"""
from typing import Optional, Tuple

Pos = Tuple[int, int]


class IFCError(Exception):
    """Base class for every error raised by the ifc package."""


class LatticeMismatchError(IFCError):
    """Two labels from different lattice instances were combined."""


class LabelSyntaxError(IFCError):
    """A label or lattice description could not be parsed."""


class ParseError(IFCError):
    """Lexing or parsing failed at a given source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(message, line, column)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


class TypeCheckError(IFCError):
    """
    A typing rule rejected an expression.

    Args:
        rule: name of the rule whose premise failed (e.g. "FG-case")
        message: human readable reason
        pos: (line, column) of the offending expression when known
    """

    def __init__(self, rule: str, message: str, pos: Optional[Pos] = None):
        super().__init__(rule, message, pos)
        self.rule = rule
        self.message = message
        self.pos = pos

    def __str__(self) -> str:
        where = f" at {self.pos[0]}:{self.pos[1]}" if self.pos else ""
        return f"[{self.rule}]{where} {self.message}"


class FGTypeError(TypeCheckError):
    """Rejection by the fine-grained checker."""


class CGTypeError(TypeCheckError):
    """Rejection by the coarse-grained checker."""


class EvalTimeout(IFCError):
    """Evaluation ran out of fuel (or recursion head-room) before producing a value."""

    def __init__(self, steps: int, reason: str = "fuel"):
        super().__init__(steps, reason)
        self.steps = steps
        self.reason = reason

    def __str__(self) -> str:
        return f"evaluation timed out after {self.steps} steps ({self.reason})"


class StuckError(IFCError):
    """The evaluator reached a configuration no rule applies to. Signals a checker bug."""


class TranslationInvariantError(IFCError):
    """A translation produced or consumed a term violating its own precondition."""


class GenerationError(IFCError):
    """A program generator could not close a derivation within its budget."""


class PreconditionError(IFCError):
    """An oracle was asked to check a program outside its preconditions."""
