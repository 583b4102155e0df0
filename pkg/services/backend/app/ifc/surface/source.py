"""
Source files: a language tag, a lattice, an optional typing context and a body.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

from ..core.lattice import Lattice

logger = logging.getLogger(__name__)

LANGUAGES = ("fg", "cg")


@dataclass
class SourceFile:
    """
    A parsed ``.ifc`` file.

    ``context`` maps free variables of ``body`` to their declared types in
    declaration order.
    """

    language: str
    lattice: Lattice
    body: Any
    context: Dict[str, Any] = field(default_factory=dict)

    @property
    def is_fg(self) -> bool:
        return self.language == "fg"


def load_source(path: str, lattice: Optional[Lattice] = None) -> SourceFile:
    """
    Read and parse an ``.ifc`` file.

    Raises:
        FileNotFoundError: the path does not exist
        ParseError: the text is malformed
    """
    from .parser import parse

    text = Path(path).read_text(encoding="utf-8")
    src = parse(text, lattice)
    logger.info(f"Loaded {src.language} program from {path} ({len(text)} chars)")
    return src
