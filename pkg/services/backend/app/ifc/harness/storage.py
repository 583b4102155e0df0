"""
Disk persistence for failing fuzz cases.

Every fuzz run that finds a failure gets its own directory:

    <REPLAY_DIR>/<timestamp>/<n>.ifc

Each file is a loadable ``.ifc`` program preceded by ``;`` comment lines
carrying the case number, seed, oracle and verdict, so a replay can be
fed straight back into ``typecheck``, ``eval`` or ``ni-check``.
"""
import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

from ..core.config import AppConfig
from ..surface.printer import pretty_source
from ..surface.source import SourceFile
from .verdict import Verdict

logger = logging.getLogger(__name__)


class ReplayStore:
    """Writes failing cases of one fuzz run under a timestamped directory."""

    def __init__(self, root: Optional[str] = None, stamp: Optional[str] = None):
        self.root = Path(root or AppConfig.REPLAY_DIR)
        self.stamp = stamp or datetime.now().strftime("%Y%m%d-%H%M%S")
        self.saved: List[Path] = []

    @property
    def folder(self) -> Path:
        return self.root / self.stamp

    def save(self, n: int, src: SourceFile, verdict: Verdict, extra: Optional[Dict[str, str]] = None) -> Path:
        """
        Write replay ``n`` and return its path.

        Args:
            n: replay number within the run, also the default ``case`` header
            src: the program, printed with its lattice and context
            verdict: the oracle outcome recorded in the header
            extra: further header fields (direction, language, ...)
        """
        self.folder.mkdir(parents=True, exist_ok=True)
        path = self.folder / f"{n}.ifc"
        header = {"case": str(n), **(extra or {})}
        for record in verdict.records():
            key, _, value = record.partition("=")
            if key != "program":
                header[key] = value.replace("\n", " ")
        lines = [f"; {key}: {value}" for key, value in header.items()]
        path.write_text("\n".join(lines) + "\n" + pretty_source(src), encoding="utf-8")
        self.saved.append(path)
        logger.info(f"Saved replay {path}")
        return path


def read_header(path: str) -> Dict[str, str]:
    """The ``; key: value`` comment lines at the top of a replay file."""
    header = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.startswith(";"):
            break
        key, sep, value = line[1:].partition(":")
        if sep:
            header[key.strip()] = value.strip()
    return header
