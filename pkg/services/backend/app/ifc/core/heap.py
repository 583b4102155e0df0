"""
Mutable store shared by the FG evaluator and the CG forcing semantics.
"""
from dataclasses import dataclass, field
from typing import Dict, Generic, Iterator, Tuple, TypeVar

from .errors import StuckError

V = TypeVar("V")


@dataclass(frozen=True)
class Loc:
    """A heap location. Locations are never reused."""

    index: int

    def __str__(self) -> str:
        return f"#loc{self.index}"


@dataclass
class Heap(Generic[V]):
    """
    Map from locations to values with a strictly increasing allocation counter.

    Cells are never deallocated.
    """

    cells: Dict[Loc, V] = field(default_factory=dict)
    next_index: int = 0

    def alloc(self, value: V) -> Loc:
        loc = Loc(self.next_index)
        self.next_index += 1
        self.cells[loc] = value
        return loc

    def load(self, loc: Loc) -> V:
        try:
            return self.cells[loc]
        except KeyError:
            raise StuckError(f"dangling location {loc}") from None

    def store(self, loc: Loc, value: V) -> None:
        if loc not in self.cells:
            raise StuckError(f"dangling location {loc}")
        self.cells[loc] = value

    def copy(self) -> "Heap[V]":
        # Values are immutable, so a shallow copy isolates the two heaps.
        return Heap(dict(self.cells), self.next_index)

    def items(self) -> Iterator[Tuple[Loc, V]]:
        return iter(sorted(self.cells.items(), key=lambda kv: kv[0].index))

    def __len__(self) -> int:
        return len(self.cells)
