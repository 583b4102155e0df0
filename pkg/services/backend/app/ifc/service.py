"""
Pipelines shared by the command line and the HTTP API.

Each function takes a parsed ``SourceFile`` (or source text) plus the
options of one command and returns a report; errors propagate as the
``IFCError`` subclasses the callers map to exit or status codes.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

from pydantic import ValidationError

from .cg.checker import cg_typecheck
from .cg.evaluator import cg_run
from .core.errors import PreconditionError
from .core.lattice import Label, parse_lattice
from .fg.checker import fg_typecheck
from .fg.evaluator import fg_eval
from .harness.oracles import ni_check_cg, ni_check_fg
from .harness.values import default_env
from .harness.verdict import NIConfig, Verdict
from .surface.parser import parse, parse_label
from .surface.printer import pretty, pretty_source, render_value
from .surface.source import SourceFile
from .translate.cg2fg import cg2fg_check, cg2fg_context, cg2fg_expr
from .translate.fg2cg import fg2cg_check, fg2cg_context, fg2cg_expr

logger = logging.getLogger(__name__)

DIRECTIONS = ("fg2cg", "cg2fg")


@dataclass
class TypeReport:
    language: str
    type: str

    def records(self) -> List[str]:
        return [f"language={self.language}", f"type={self.type}"]


@dataclass
class EvalReport:
    language: str
    value: str
    heap_size: int
    steps: int

    def records(self) -> List[str]:
        return [
            f"language={self.language}",
            f"value={self.value}",
            f"heap_size={self.heap_size}",
            f"steps={self.steps}",
        ]


@dataclass
class TranslateReport:
    direction: str
    target: str
    source_type: str
    target_type: str
    checked: bool = False


def load_text(text: str, lattice_text: Optional[str] = None) -> SourceFile:
    """Parse source text, replacing the declared lattice when ``lattice_text`` is given."""
    lattice = parse_lattice(lattice_text) if lattice_text else None
    return parse(text, lattice)


def _pc(src: SourceFile, pc: Optional[str]) -> Label:
    return parse_label(pc, src.lattice) if pc else src.lattice.bottom


def typecheck_source(src: SourceFile, pc: Optional[str] = None) -> TypeReport:
    """
    Principal type of the program body under its declared context.

    Raises:
        TypeCheckError: naming the failed rule
    """
    if src.is_fg:
        t = fg_typecheck(src.context, _pc(src, pc), src.body)
    else:
        t = cg_typecheck(src.context, src.body, src.lattice)
    return TypeReport(src.language, pretty(t))


def eval_source(src: SourceFile, fuel: Optional[int] = None, force: bool = False, seed: int = 0) -> EvalReport:
    """
    Typecheck and run the program body.

    Context variables are bound to generated inhabitants (seeded by
    ``seed``). A CG computation is printed opaquely unless ``force`` is set.

    Raises:
        TypeCheckError: the program does not typecheck
        EvalTimeout: fuel or recursion head-room exhausted
    """
    typecheck_source(src)
    heap, env = default_env(src.context, seed)
    if src.is_fg:
        result = fg_eval(heap, src.body, env, fuel)
    else:
        result = cg_run(heap, src.body, env, fuel, force=force)
    logger.info(f"Evaluated {src.language} program in {result.steps} steps")
    return EvalReport(src.language, render_value(result.value), len(result.heap), result.steps)


def translate_source(
    src: SourceFile,
    direction: Optional[str] = None,
    check: bool = False,
    pc: Optional[str] = None,
) -> TranslateReport:
    """
    Translate the program into the other language.

    The target is printed as a complete source file whose context is the
    translated source context. With ``check`` the target is re-typechecked
    against the type the translation promises.

    Raises:
        ValueError: ``direction`` does not start at the source language
        TypeCheckError: the source does not typecheck
        TranslationInvariantError: ``check`` failed
    """
    expected = "fg2cg" if src.is_fg else "cg2fg"
    direction = direction or expected
    if direction != expected:
        raise ValueError(f"direction {direction} does not apply to a {src.language} program")
    if src.is_fg:
        label = _pc(src, pc)
        result = fg2cg_expr(src.context, label, src.body)
        if check:
            fg2cg_check(src.context, label, result)
        target = SourceFile("cg", src.lattice, result.target, fg2cg_context(src.context))
    else:
        result = cg2fg_expr(src.context, src.body, src.lattice)
        if check:
            cg2fg_check(src.context, result, src.lattice)
        target = SourceFile("fg", src.lattice, result.target, cg2fg_context(src.context, src.lattice))
    logger.info(f"Translated {src.language} program ({direction}, check={check})")
    return TranslateReport(
        direction=direction,
        target=pretty_source(target),
        source_type=pretty(result.source_type),
        target_type=pretty(result.target_type),
        checked=check,
    )


def ni_check_source(
    src: SourceFile,
    secret_label: Optional[str] = None,
    observer: Optional[str] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    fuel: Optional[int] = None,
) -> Verdict:
    """
    Noninterference check of a program with exactly one free secret.

    The secret is the single context variable; its declared label is
    replaced by ``secret_label`` (default ⊤). The observer defaults to ⊥.

    Raises:
        PreconditionError: not exactly one context variable, or the
            secret label flows to the observer
        TypeCheckError: the program does not have an observable boolean type
    """
    if len(src.context) != 1:
        raise PreconditionError(
            f"ni-check needs exactly one declared secret variable, found {len(src.context)}"
        )
    (name, secret_type), = src.context.items()
    options = {
        "secret_var": name,
        "secret_type": secret_type,
        "secret_label": parse_label(secret_label, src.lattice) if secret_label else src.lattice.top,
        "observer": parse_label(observer, src.lattice) if observer else src.lattice.bottom,
    }
    for key, value in (("samples", samples), ("seed", seed), ("fuel", fuel)):
        if value is not None:
            options[key] = value
    try:
        cfg = NIConfig(**options)
    except ValidationError as exc:
        raise PreconditionError("; ".join(err["msg"] for err in exc.errors())) from None
    verdict = ni_check_fg(src.body, cfg) if src.is_fg else ni_check_cg(src.body, cfg)
    logger.info(f"ni-check {src.language}: {verdict.status} over {verdict.samples} samples")
    return verdict
