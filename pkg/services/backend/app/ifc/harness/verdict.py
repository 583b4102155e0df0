"""
Oracle configuration and verdicts.
"""
import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..cg import syntax as cg
from ..core.config import EvalConfig, HarnessConfig
from ..core.lattice import Label
from ..fg import syntax as fg


class NIConfig(BaseModel):
    """
    Inputs of a noninterference check.

    ``secret_type`` is the declared type of the secret variable: an FGType
    for FG, a ``Labeled`` type for CG. Its top-level label is replaced by
    ``secret_label``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    secret_var: str = "x"
    secret_type: Any
    secret_label: Label
    observer: Label
    samples: int = Field(default_factory=lambda: HarnessConfig.NI_SAMPLES, gt=0)
    fuel: int = Field(default_factory=lambda: EvalConfig.FUEL, gt=0)
    seed: int = Field(default_factory=lambda: HarnessConfig.SEED)

    @model_validator(mode="after")
    def _check_secret(self) -> "NIConfig":
        if self.secret_label.leq(self.observer):
            raise ValueError(
                f"secret label {self.secret_label} flows to observer {self.observer}; "
                "noninterference says nothing about such a secret"
            )
        if not isinstance(self.secret_type, (fg.FGType, cg.TLabeled)):
            raise ValueError("the secret must have a labeled type (A@l in FG, Labeled l τ in CG)")
        return self

    def context_type(self) -> Any:
        """The secret's type with its label set to ``secret_label``."""
        if isinstance(self.secret_type, fg.FGType):
            return fg.FGType(self.secret_type.body, self.secret_label)
        return cg.TLabeled(self.secret_label, self.secret_type.payload)

    def context(self) -> Dict[str, Any]:
        return {self.secret_var: self.context_type()}


Status = Literal["pass", "counterexample", "inconclusive"]


class Verdict(BaseModel):
    """
    Outcome of one oracle on one program.

    A counterexample keeps the program text, the printed inputs and outputs
    and the sample seed that regenerates the inputs.
    """

    status: Status
    oracle: str
    samples: int = 0
    timeouts: int = 0
    program: Optional[str] = None
    v1: Optional[str] = None
    v2: Optional[str] = None
    result1: Optional[str] = None
    result2: Optional[str] = None
    seed: Optional[int] = None
    detail: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status != "counterexample"

    def records(self) -> List[str]:
        """``key=value`` lines, unset fields omitted."""
        out = []
        for key, value in self.model_dump(exclude_none=True).items():
            text = value if isinstance(value, str) else json.dumps(value)
            out.append(f"{key}={text}")
        return out


def passed(oracle: str, **fields) -> Verdict:
    return Verdict(status="pass", oracle=oracle, **fields)


def failed(oracle: str, **fields) -> Verdict:
    return Verdict(status="counterexample", oracle=oracle, **fields)


def inconclusive(oracle: str, **fields) -> Verdict:
    return Verdict(status="inconclusive", oracle=oracle, **fields)
