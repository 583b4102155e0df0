"""
Deterministic fresh-variable supply for the translators and generators.
"""
from typing import Iterable, Set


class FreshNames:
    """
    Hands out names ``<hint><n>`` that avoid a fixed set of reserved names.

    The counter is per supply, so two runs over the same input yield the
    same names.
    """

    def __init__(self, avoid: Iterable[str] = ()):
        self._avoid: Set[str] = set(avoid)
        self._counter = 0

    def fresh(self, hint: str = "v") -> str:
        while True:
            name = f"{hint}{self._counter}"
            self._counter += 1
            if name not in self._avoid:
                self._avoid.add(name)
                return name

    def reserve(self, names: Iterable[str]) -> None:
        self._avoid.update(names)
