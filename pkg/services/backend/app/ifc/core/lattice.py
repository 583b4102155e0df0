"""
Security lattices and labels.

Every label belongs to exactly one lattice instance. Three finite instances
are provided behind one interface: the two-point lattice {L, H}, the powerset
lattice over a finite atom set, and the binary product of two lattices.

Textual label syntax:
    L, H           two-point elements
    {a,b}, {}      powerset elements
    (l1,l2)        product elements
    bot, top       bottom / top of any lattice

Textual lattice syntax:
    2pt
    (powerset a b c)
    (product 2pt (powerset a b))
"""
import itertools
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import reduce
from typing import Any, FrozenSet, Iterable, List, Tuple

from .errors import LabelSyntaxError, LatticeMismatchError

_ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Label:
    """A lattice element. Equality is structural and includes the owning lattice."""

    lattice: "Lattice"
    value: Any

    def _same(self, other: "Label") -> None:
        if self.lattice != other.lattice:
            raise LatticeMismatchError(
                f"labels {self} and {other} belong to different lattices "
                f"({self.lattice.describe()} vs {other.lattice.describe()})"
            )

    def leq(self, other: "Label") -> bool:
        self._same(other)
        return self.lattice.leq_values(self.value, other.value)

    def join(self, other: "Label") -> "Label":
        self._same(other)
        return Label(self.lattice, self.lattice.join_values(self.value, other.value))

    def meet(self, other: "Label") -> "Label":
        self._same(other)
        return Label(self.lattice, self.lattice.meet_values(self.value, other.value))

    def is_bottom(self) -> bool:
        return self == self.lattice.bottom

    def is_top(self) -> bool:
        return self == self.lattice.top

    def __str__(self) -> str:
        return self.lattice.format_value(self.value)

    def __repr__(self) -> str:
        return f"Label({self})"


class Lattice(ABC):
    """Interface shared by every lattice instance."""

    @abstractmethod
    def values(self) -> Tuple[Any, ...]:
        """All carrier values, bottom first."""

    @abstractmethod
    def leq_values(self, a: Any, b: Any) -> bool: ...

    @abstractmethod
    def join_values(self, a: Any, b: Any) -> Any: ...

    @abstractmethod
    def meet_values(self, a: Any, b: Any) -> Any: ...

    @abstractmethod
    def bottom_value(self) -> Any: ...

    @abstractmethod
    def top_value(self) -> Any: ...

    @abstractmethod
    def format_value(self, value: Any) -> str: ...

    @abstractmethod
    def parse_value(self, text: str) -> Any: ...

    @abstractmethod
    def describe(self) -> str:
        """Lattice description in the textual lattice syntax."""

    @property
    def bottom(self) -> Label:
        return Label(self, self.bottom_value())

    @property
    def top(self) -> Label:
        return Label(self, self.top_value())

    def elements(self) -> List[Label]:
        return [Label(self, v) for v in self.values()]

    def label(self, text: str) -> Label:
        """Parse a label of this lattice from its textual form."""
        text = text.strip()
        if text in ("bot", "⊥"):
            return self.bottom
        if text in ("top", "⊤"):
            return self.top
        return Label(self, self.parse_value(text))

    def join_all(self, labels: Iterable[Label]) -> Label:
        return reduce(join, labels, self.bottom)

    def meet_all(self, labels: Iterable[Label]) -> Label:
        return reduce(meet, labels, self.top)


@dataclass(frozen=True)
class TwoPointLattice(Lattice):
    """The lattice L ⊑ H."""

    def values(self) -> Tuple[str, ...]:
        return ("L", "H")

    def leq_values(self, a: str, b: str) -> bool:
        return a == "L" or b == "H"

    def join_values(self, a: str, b: str) -> str:
        return "H" if "H" in (a, b) else "L"

    def meet_values(self, a: str, b: str) -> str:
        return "L" if "L" in (a, b) else "H"

    def bottom_value(self) -> str:
        return "L"

    def top_value(self) -> str:
        return "H"

    def format_value(self, value: str) -> str:
        return value

    def parse_value(self, text: str) -> str:
        if text not in ("L", "H"):
            raise LabelSyntaxError(f"'{text}' is not a two-point label (expected L or H)")
        return text

    def describe(self) -> str:
        return "2pt"


@dataclass(frozen=True)
class PowersetLattice(Lattice):
    """Subsets of a finite atom set ordered by inclusion."""

    atoms: Tuple[str, ...]

    def values(self) -> Tuple[FrozenSet[str], ...]:
        subsets = []
        for size in range(len(self.atoms) + 1):
            for combo in itertools.combinations(self.atoms, size):
                subsets.append(frozenset(combo))
        return tuple(subsets)

    def leq_values(self, a: FrozenSet[str], b: FrozenSet[str]) -> bool:
        return a <= b

    def join_values(self, a: FrozenSet[str], b: FrozenSet[str]) -> FrozenSet[str]:
        return a | b

    def meet_values(self, a: FrozenSet[str], b: FrozenSet[str]) -> FrozenSet[str]:
        return a & b

    def bottom_value(self) -> FrozenSet[str]:
        return frozenset()

    def top_value(self) -> FrozenSet[str]:
        return frozenset(self.atoms)

    def format_value(self, value: FrozenSet[str]) -> str:
        if not value:
            return "bot"
        return "{" + ",".join(a for a in self.atoms if a in value) + "}"

    def parse_value(self, text: str) -> FrozenSet[str]:
        if not (text.startswith("{") and text.endswith("}")):
            raise LabelSyntaxError(f"'{text}' is not a powerset label (expected {{a,b,...}})")
        inner = text[1:-1].strip()
        if not inner:
            return frozenset()
        atoms = [a.strip() for a in inner.split(",")]
        for atom in atoms:
            if atom not in self.atoms:
                raise LabelSyntaxError(f"unknown atom '{atom}' (lattice atoms: {', '.join(self.atoms)})")
        return frozenset(atoms)

    def describe(self) -> str:
        return "(powerset " + " ".join(self.atoms) + ")"


@dataclass(frozen=True)
class ProductLattice(Lattice):
    """Componentwise product of two lattices."""

    left: Lattice
    right: Lattice

    def values(self) -> Tuple[Tuple[Any, Any], ...]:
        return tuple(itertools.product(self.left.values(), self.right.values()))

    def leq_values(self, a, b) -> bool:
        return self.left.leq_values(a[0], b[0]) and self.right.leq_values(a[1], b[1])

    def join_values(self, a, b):
        return (self.left.join_values(a[0], b[0]), self.right.join_values(a[1], b[1]))

    def meet_values(self, a, b):
        return (self.left.meet_values(a[0], b[0]), self.right.meet_values(a[1], b[1]))

    def bottom_value(self):
        return (self.left.bottom_value(), self.right.bottom_value())

    def top_value(self):
        return (self.left.top_value(), self.right.top_value())

    def format_value(self, value) -> str:
        return f"({self.left.format_value(value[0])},{self.right.format_value(value[1])})"

    def parse_value(self, text: str):
        if not (text.startswith("(") and text.endswith(")")):
            raise LabelSyntaxError(f"'{text}' is not a product label (expected (l1,l2))")
        parts = _split_top_level(text[1:-1])
        if len(parts) != 2:
            raise LabelSyntaxError(f"product label '{text}' must have exactly two components")
        return (self.left.label(parts[0]).value, self.right.label(parts[1]).value)

    def describe(self) -> str:
        return f"(product {self.left.describe()} {self.right.describe()})"


def _split_top_level(text: str) -> List[str]:
    """Split on commas that are not nested inside braces or parentheses."""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    parts.append("".join(current).strip())
    return parts


# ---------------------------------------------------------------------------
# Free-function forms
# ---------------------------------------------------------------------------

def leq(l1: Label, l2: Label) -> bool:
    """l1 ⊑ l2. Raises LatticeMismatchError across instances."""
    return l1.leq(l2)


def join(l1: Label, l2: Label) -> Label:
    """Least upper bound."""
    return l1.join(l2)


def meet(l1: Label, l2: Label) -> Label:
    """Greatest lower bound."""
    return l1.meet(l2)


# ---------------------------------------------------------------------------
# Lattice descriptions
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(\(|\)|[^\s()]+)")


def parse_lattice(text: str) -> Lattice:
    """
    Parse a lattice description such as ``2pt`` or ``(product 2pt (powerset a b))``.

    Raises:
        LabelSyntaxError: on malformed descriptions
    """
    tokens = [m.group(1) for m in _TOKEN_RE.finditer(text)]
    if not tokens:
        raise LabelSyntaxError("empty lattice description")
    lattice, rest = _parse_lattice_tokens(tokens)
    if rest:
        raise LabelSyntaxError(f"trailing input in lattice description: {' '.join(rest)}")
    return lattice


def _parse_lattice_tokens(tokens: List[str]) -> Tuple[Lattice, List[str]]:
    if not tokens:
        raise LabelSyntaxError("unexpected end of lattice description")
    head, rest = tokens[0], tokens[1:]
    if head in ("2pt", "two-point"):
        return TwoPointLattice(), rest
    if head != "(":
        raise LabelSyntaxError(f"unknown lattice '{head}'")
    if not rest:
        raise LabelSyntaxError("unexpected end of lattice description")
    kind, rest = rest[0], rest[1:]
    if kind == "powerset":
        atoms = []
        while rest and rest[0] != ")":
            if not _ATOM_RE.fullmatch(rest[0]):
                raise LabelSyntaxError(f"invalid powerset atom '{rest[0]}'")
            atoms.append(rest[0])
            rest = rest[1:]
        if not rest:
            raise LabelSyntaxError("unterminated powerset description")
        if len(set(atoms)) != len(atoms):
            raise LabelSyntaxError("powerset atoms must be distinct")
        return PowersetLattice(tuple(atoms)), rest[1:]
    if kind == "product":
        left, rest = _parse_lattice_tokens(rest)
        right, rest = _parse_lattice_tokens(rest)
        if not rest or rest[0] != ")":
            raise LabelSyntaxError("product lattice takes exactly two components")
        return ProductLattice(left, right), rest[1:]
    if kind in ("2pt", "two-point") and rest and rest[0] == ")":
        return TwoPointLattice(), rest[1:]
    raise LabelSyntaxError(f"unknown lattice kind '{kind}'")
