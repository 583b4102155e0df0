"""
Fuzzing driver: generate programs, run the oracles, save failures.

Each case draws its own seed from the run seed, so a run is reproducible
and any single case can be regenerated from the seed recorded in its
replay header. A case generates two programs:

- a closed program, used by the typing-preservation and equivalence
  oracles of the chosen translation direction. A closed program that
  runs out of fuel is regenerated up to
  ``HarnessConfig.TERMINATION_RETRIES`` times, and a run whose
  terminating share stays below ``HarnessConfig.MIN_TERMINATION`` fails;
- a one-secret program ``x : A^⊤ ⊢ e : bool^⊥`` (FG) or
  ``x : Labeled ⊤ τ ⊢ e : SLIO _ ⊥ bool`` (CG), used by the
  noninterference oracle and, with a direction, its transfer through the
  translation.

Cases are independent; with more than one worker they run in a process
pool and the parent only aggregates.
"""
import json
import logging
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple, TypeVar

from pydantic import BaseModel, Field

from ..cg import syntax as cg
from ..cg.evaluator import cg_run
from ..core.config import AppConfig, HarnessConfig
from ..core.errors import EvalTimeout, GenerationError, IFCError
from ..core.lattice import Lattice, parse_lattice
from ..fg import syntax as fg
from ..fg.evaluator import fg_eval
from ..surface.printer import pretty_cg_expr, pretty_fg_expr
from ..surface.source import SourceFile
from .generators import gen_cg_program, gen_cg_type, gen_fg_program, gen_fg_type
from .oracles import (
    equiv_check_cg2fg, equiv_check_fg2cg, inr_check_cg2fg, ni_check_cg, ni_check_fg,
    ni_transfer_cg2fg, ni_transfer_fg2cg, shrink_cg, shrink_fg, typing_preservation_cg2fg,
    typing_preservation_fg2cg,
)
from .storage import ReplayStore
from .verdict import NIConfig, Verdict, failed

logger = logging.getLogger(__name__)

DIRECTIONS = {"fg": "fg2cg", "cg": "cg2fg"}

E = TypeVar("E")


class FuzzSummary(BaseModel):
    """Aggregate outcome of a fuzz run; ``oracles`` counts statuses per oracle."""

    lang: str
    direction: Optional[str] = None
    n: int
    size: int
    seed: int
    cases: int = 0
    skipped: int = 0
    failures: int = 0
    closed: int = 0
    terminated: int = 0
    oracles: Dict[str, Dict[str, int]] = Field(default_factory=dict)
    replays: List[str] = Field(default_factory=list)

    @property
    def termination_rate(self) -> float:
        """Share of closed programs that finished within fuel."""
        return self.terminated / self.closed if self.closed else 1.0

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.termination_rate >= HarnessConfig.MIN_TERMINATION

    def records(self) -> List[str]:
        out = [
            f"lang={self.lang}",
            f"direction={self.direction or '-'}",
            f"n={self.n}",
            f"size={self.size}",
            f"seed={self.seed}",
            f"cases={self.cases}",
            f"skipped={self.skipped}",
            f"failures={self.failures}",
        ]
        if self.closed:
            out.append(f"terminated={self.terminated}/{self.closed}")
        for oracle in sorted(self.oracles):
            counts = self.oracles[oracle]
            out.append(f"oracle.{oracle}=" + ",".join(f"{k}:{counts[k]}" for k in sorted(counts)))
        out += [f"replay={path}" for path in self.replays]
        return out


@dataclass(frozen=True)
class CaseTask:
    n: int
    seed: int
    lang: str
    direction: Optional[str]
    size: int
    lattice_text: str


@dataclass
class CaseOutcome:
    n: int
    seed: int
    skipped: bool
    verdicts: List[Verdict]
    # src is None when the case broke before it had a program
    failures: List[Tuple[Verdict, Optional[SourceFile]]]
    terminated: Optional[bool] = None


# ---------------------------------------------------------------------------
# One case
# ---------------------------------------------------------------------------

def _guard(oracle: str, program: str, check) -> Verdict:
    """Run one oracle; a library error inside it is a failure of that oracle."""
    try:
        return check()
    except IFCError as exc:
        logger.warning(f"{oracle} raised {type(exc).__name__}: {exc}")
        return failed(oracle, samples=0, program=program, detail=f"{type(exc).__name__}: {exc}")


def _terminating(
    task: CaseTask, program: E, generate: Callable[[], E], run: Callable[[E], object]
) -> Tuple[E, bool]:
    """Regenerate a closed program while it runs out of fuel; report whether the last one finished."""
    for attempt in range(HarnessConfig.TERMINATION_RETRIES + 1):
        try:
            run(program)
            return program, True
        except EvalTimeout:
            logger.debug(f"case {task.n}: closed program {attempt} timed out")
        if attempt < HarnessConfig.TERMINATION_RETRIES:
            program = generate()
    return program, False


def _fg_case(task: CaseTask, lattice: Lattice) -> CaseOutcome:
    rng = random.Random(task.seed)
    show = pretty_fg_expr
    bot, top = lattice.bottom, lattice.top
    verdicts: List[Verdict] = []
    failures: List[Tuple[Verdict, Optional[SourceFile]]] = []

    def record(verdict: Verdict, e: fg.FGExpr, ctx: dict) -> None:
        verdicts.append(verdict)
        if verdict.status == "counterexample":
            failures.append((verdict, SourceFile("fg", lattice, e, ctx)))

    closed_goal = fg.FGType(fg.TBool(), rng.choice(lattice.elements()))
    closed = gen_fg_program(task.size, {}, bot, rng.randrange(2**31), closed_goal, lattice)
    terminated = None
    if task.direction:
        closed, terminated = _terminating(
            task, closed,
            lambda: gen_fg_program(task.size, {}, bot, rng.randrange(2**31), closed_goal, lattice),
            lambda e: fg_eval(None, e),
        )
        record(_guard("typing-fg2cg", show(closed), lambda: typing_preservation_fg2cg({}, bot, closed)), closed, {})
        record(_guard("equiv-fg2cg", show(closed), lambda: equiv_check_fg2cg(closed, pc=bot)), closed, {})

    secret = gen_fg_type(rng, lattice, HarnessConfig.TYPE_DEPTH)
    cfg = NIConfig(secret_type=secret, secret_label=top, observer=bot, seed=rng.randrange(2**31))
    ctx = cfg.context()
    program = gen_fg_program(task.size, ctx, bot, rng.randrange(2**31), fg.FGType(fg.TBool(), bot), lattice)
    verdict = _guard("ni-fg", show(program), lambda: ni_check_fg(program, cfg))
    if verdict.status == "counterexample":
        program = shrink_fg(program, lambda c: ni_check_fg(c, cfg).status == "counterexample")
    record(verdict, program, ctx)
    if task.direction:
        record(_guard("ni-transfer-fg2cg", show(program), lambda: ni_transfer_fg2cg(program, cfg)), program, ctx)
    return CaseOutcome(task.n, task.seed, False, verdicts, failures, terminated)


def _cg_case(task: CaseTask, lattice: Lattice) -> CaseOutcome:
    rng = random.Random(task.seed)
    show = pretty_cg_expr
    bot, top = lattice.bottom, lattice.top
    verdicts: List[Verdict] = []
    failures: List[Tuple[Verdict, Optional[SourceFile]]] = []

    def record(verdict: Verdict, e: cg.CGExpr, ctx: dict) -> None:
        verdicts.append(verdict)
        if verdict.status == "counterexample":
            failures.append((verdict, SourceFile("cg", lattice, e, ctx)))

    closed_goal = cg.TSlio(rng.choice(lattice.elements()), rng.choice(lattice.elements()), cg.TBool())
    closed = gen_cg_program(task.size, {}, rng.randrange(2**31), closed_goal, lattice)
    terminated = None
    if task.direction:
        closed, terminated = _terminating(
            task, closed,
            lambda: gen_cg_program(task.size, {}, rng.randrange(2**31), closed_goal, lattice),
            lambda e: cg_run(None, e),
        )
        record(_guard("typing-cg2fg", show(closed), lambda: typing_preservation_cg2fg({}, closed, lattice)), closed, {})
        record(_guard("equiv-cg2fg", show(closed), lambda: equiv_check_cg2fg(closed, lattice=lattice)), closed, {})
        record(_guard("inr-unreachable", show(closed), lambda: inr_check_cg2fg(closed, lattice=lattice)), closed, {})

    secret = cg.TLabeled(top, gen_cg_type(rng, lattice, HarnessConfig.TYPE_DEPTH))
    cfg = NIConfig(secret_type=secret, secret_label=top, observer=bot, seed=rng.randrange(2**31))
    ctx = cfg.context()
    goal = cg.TSlio(rng.choice(lattice.elements()), bot, cg.TBool())
    program = gen_cg_program(task.size, ctx, rng.randrange(2**31), goal, lattice)
    verdict = _guard("ni-cg", show(program), lambda: ni_check_cg(program, cfg))
    if verdict.status == "counterexample":
        program = shrink_cg(program, lambda c: ni_check_cg(c, cfg).status == "counterexample")
    record(verdict, program, ctx)
    if task.direction:
        record(_guard("ni-transfer-cg2fg", show(program), lambda: ni_transfer_cg2fg(program, cfg)), program, ctx)
    return CaseOutcome(task.n, task.seed, False, verdicts, failures, terminated)


def run_case(task: CaseTask) -> CaseOutcome:
    """Generate and check one case. Top-level so process pools can pickle it."""
    lattice = parse_lattice(task.lattice_text)
    try:
        if task.lang == "fg":
            return _fg_case(task, lattice)
        return _cg_case(task, lattice)
    except GenerationError as exc:
        logger.debug(f"case {task.n} skipped: {exc}")
        return CaseOutcome(task.n, task.seed, True, [], [])
    except IFCError as exc:
        logger.error(f"case {task.n} (seed {task.seed}) raised {type(exc).__name__}: {exc}")
        verdict = failed("case-error", samples=0, seed=task.seed, detail=f"{type(exc).__name__}: {exc}")
        return CaseOutcome(task.n, task.seed, False, [verdict], [(verdict, None)])


# ---------------------------------------------------------------------------
# A run
# ---------------------------------------------------------------------------

def run_fuzz(
    lang: str,
    direction: Optional[str] = None,
    n: int = 100,
    size: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    lattice_text: Optional[str] = None,
    replay_dir: Optional[str] = None,
) -> FuzzSummary:
    """
    Fuzz ``n`` generated cases of ``lang``.

    Args:
        lang: ``fg`` or ``cg``
        direction: translation to exercise (``fg2cg`` for fg, ``cg2fg`` for cg);
            None checks noninterference of the source language only
        n: number of cases
        size: generator node budget (default ``HarnessConfig.GEN_SIZE``)
        seed: run seed (default ``HarnessConfig.SEED``)
        workers: process count (default ``HarnessConfig.WORKERS``)
        lattice_text: lattice description (default ``AppConfig.DEFAULT_LATTICE``)
        replay_dir: root for replay files (default ``AppConfig.REPLAY_DIR``)

    Raises:
        ValueError: unknown language, or a direction that does not start at ``lang``
    """
    if lang not in DIRECTIONS:
        raise ValueError(f"unknown language '{lang}' (expected fg or cg)")
    if direction is not None and direction != DIRECTIONS[lang]:
        raise ValueError(f"direction {direction} does not translate from {lang}")
    if n < 0:
        raise ValueError("n must be non-negative")
    size = HarnessConfig.GEN_SIZE if size is None else size
    seed = HarnessConfig.SEED if seed is None else seed
    workers = workers or HarnessConfig.WORKERS
    lattice_text = lattice_text or AppConfig.DEFAULT_LATTICE

    master = random.Random(seed)
    tasks = [
        CaseTask(i, master.randrange(2**31), lang, direction, size, lattice_text)
        for i in range(n)
    ]
    logger.info(f"Fuzzing {n} {lang} cases (direction={direction}, size={size}, seed={seed}, workers={workers})")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_case, tasks))
    else:
        outcomes = [run_case(task) for task in tasks]

    summary = FuzzSummary(lang=lang, direction=direction, n=n, size=size, seed=seed)
    counts: Dict[str, Counter] = {}
    store = ReplayStore(replay_dir)
    for outcome in outcomes:
        if outcome.skipped:
            summary.skipped += 1
            continue
        summary.cases += 1
        if outcome.terminated is not None:
            summary.closed += 1
            summary.terminated += int(outcome.terminated)
        for verdict in outcome.verdicts:
            counts.setdefault(verdict.oracle, Counter())[verdict.status] += 1
        for verdict, src in outcome.failures:
            summary.failures += 1
            if src is None:
                continue
            path = store.save(
                len(store.saved), src, verdict,
                {"case": str(outcome.n), "lang": lang, "case_seed": str(outcome.seed)},
            )
            summary.replays.append(str(path))
        logger.info("FUZZ_CASE " + json.dumps({
            "n": outcome.n,
            "seed": outcome.seed,
            "verdicts": {v.oracle: v.status for v in outcome.verdicts},
        }))
    summary.oracles = {oracle: dict(c) for oracle, c in counts.items()}
    if summary.failures:
        logger.warning(f"Fuzzing found {summary.failures} failures; replays in {store.folder}")
    if summary.termination_rate < HarnessConfig.MIN_TERMINATION:
        logger.warning(
            f"Only {summary.terminated} of {summary.closed} closed programs terminated "
            f"(need {HarnessConfig.MIN_TERMINATION:.0%})"
        )
    return summary
