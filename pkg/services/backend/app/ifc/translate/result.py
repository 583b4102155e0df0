"""
Result record shared by both translation directions.
"""
from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class TransResult:
    """
    A translated term together with its source type and the type the
    translation promises for it.

    For FG to CG the promised type is ``SLIO pc ⊥ ⟦τ⟧``; for CG to FG it is
    ``⟦τ⟧`` at pc ⊤. The target's synthesized type is a subtype of it.
    """

    target: Any
    source_type: Any
    target_type: Any
