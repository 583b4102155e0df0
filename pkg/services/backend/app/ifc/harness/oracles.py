"""
Differential oracles.

Each oracle runs one program (or a program and its translation) and returns
a ``Verdict``. Timeouts never count as failures: runs are compared only when
both terminate.
"""
import logging
import random
from typing import Any, Callable, Iterable, Mapping, Optional, Tuple

from ..cg import syntax as cg
from ..cg.checker import cg_typecheck
from ..cg.evaluator import LabeledV, cg_run
from ..core.config import default_lattice
from ..core.errors import CGTypeError, EvalTimeout, FGTypeError, IFCError, TranslationInvariantError
from ..core.heap import Heap
from ..core.lattice import Label, Lattice
from ..core.runtime import resolve_fuel
from ..core.values import InlV, InrV, PairV
from ..fg import syntax as fg
from ..fg.checker import fg_typecheck
from ..fg.evaluator import fg_eval
from ..surface.printer import pretty_cg_expr, pretty_cg_type, pretty_fg_expr, pretty_fg_type
from ..translate.cg2fg import cg2fg_check, cg2fg_expr, cg2fg_type
from ..translate.fg2cg import fg2cg_check, fg2cg_expr, fg2cg_type
from .values import encoded_env, gen_distinct, gen_value
from .verdict import NIConfig, Verdict, failed, inconclusive, passed

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Observations
# ---------------------------------------------------------------------------

def observe_fg(v: Any) -> Any:
    """Strip the ``inl`` coding of translated computations."""
    while isinstance(v, InlV):
        v = v.value
    return v


def observe_cg(v: Any) -> Any:
    """Strip ``Labeled`` wrappers."""
    while isinstance(v, LabeledV):
        v = v.payload
    return v


def fg_observed_label(t: fg.FGType) -> Optional[Label]:
    """
    Label at which a boolean result is observable, or None when ``t`` has
    no boolean at its core. Coded sums ``(τ + unit)^ℓ`` are looked through.
    """
    label = t.label
    while isinstance(t.body, fg.TSum) and isinstance(t.body.right.body, fg.TUnit):
        t = t.body.left
        label = label.join(t.label)
    return label if isinstance(t.body, fg.TBool) else None


def cg_observed_label(t: cg.CGType) -> Optional[Label]:
    """Label at which the boolean result of a computation ``SLIO _ ℓ τ`` is observable."""
    if not isinstance(t, cg.TSlio):
        return None
    label, result = t.taint, t.result
    while isinstance(result, cg.TLabeled):
        label = label.join(result.label)
        result = result.payload
    return label if isinstance(result, cg.TBool) else None


# ---------------------------------------------------------------------------
# Noninterference
# ---------------------------------------------------------------------------

def _ni_loop(oracle: str, program: str, run: Callable, observe: Callable, cfg: NIConfig) -> Verdict:
    secret_type = cfg.context_type()
    master = random.Random(cfg.seed)
    timeouts = 0
    compared = 0
    for _ in range(cfg.samples):
        sample_seed = master.randrange(2 ** 32)
        rng = random.Random(sample_seed)
        heap1, heap2 = Heap(), Heap()
        v1 = gen_value(secret_type, rng, heap1)
        v2 = gen_distinct(secret_type, rng, heap2, v1)
        try:
            r1 = observe(run(heap1, {cfg.secret_var: v1}).value)
            r2 = observe(run(heap2, {cfg.secret_var: v2}).value)
        except EvalTimeout:
            timeouts += 1
            continue
        compared += 1
        if r1 != r2:
            logger.warning(f"{oracle}: counterexample on {program} with {v1} / {v2}")
            return failed(
                oracle, samples=compared, timeouts=timeouts, program=program,
                v1=str(v1), v2=str(v2), result1=str(r1), result2=str(r2), seed=sample_seed,
            )
    if compared == 0:
        logger.warning(f"{oracle}: every sample timed out on {program}")
        return inconclusive(oracle, samples=0, timeouts=timeouts, program=program)
    return passed(oracle, samples=compared, timeouts=timeouts, program=program)


def ni_check_fg(e: fg.FGExpr, cfg: NIConfig, pc: Optional[Label] = None) -> Verdict:
    """
    Run ``e`` on pairs of secrets and compare the observable boolean results.

    Requires ``x : A^ℓi ⊢_pc e : bool^ℓ`` with ``ℓ ⊑ observer``.

    Raises:
        FGTypeError: the program does not meet that typing precondition
    """
    pc = pc or cfg.observer.lattice.bottom
    t = fg_typecheck(cfg.context(), pc, e)
    label = fg_observed_label(t)
    if label is None or not label.leq(cfg.observer):
        raise FGTypeError(
            "FG-sub",
            f"result type {pretty_fg_type(t)} is not a boolean observable at {cfg.observer}",
            getattr(e, "pos", None),
        )
    run = lambda heap, env: fg_eval(heap, e, env, cfg.fuel)  # noqa: E731
    return _ni_loop("ni-fg", pretty_fg_expr(e), run, observe_fg, cfg)


def ni_check_cg(e: cg.CGExpr, cfg: NIConfig) -> Verdict:
    """
    Force ``e`` on pairs of secrets and compare the observable boolean results.

    Requires ``x : Labeled ℓi τ ⊢ e : SLIO _ ℓ bool`` with ``ℓ ⊑ observer``
    (a ``Labeled`` boolean result counts its label too).

    Raises:
        CGTypeError: the program does not meet that typing precondition
    """
    lattice = cfg.observer.lattice
    t = cg_typecheck(cfg.context(), e, lattice)
    label = cg_observed_label(t)
    if label is None or not label.leq(cfg.observer):
        raise CGTypeError(
            "CG-sub",
            f"result type {pretty_cg_type(t)} is not a boolean computation observable at {cfg.observer}",
            getattr(e, "pos", None),
        )
    run = lambda heap, env: cg_run(heap, e, env, cfg.fuel)  # noqa: E731
    return _ni_loop("ni-cg", pretty_cg_expr(e), run, observe_cg, cfg)


def ni_transfer_fg2cg(e: fg.FGExpr, cfg: NIConfig, pc: Optional[Label] = None) -> Verdict:
    """Translate an FG NI program to CG and run the CG oracle on the result."""
    pc = pc or cfg.observer.lattice.bottom
    result = fg2cg_expr(cfg.context(), pc, e)
    target_cfg = cfg.model_copy(update={"secret_type": fg2cg_type(cfg.context_type())})
    verdict = ni_check_cg(result.target, target_cfg)
    return verdict.model_copy(update={"oracle": "ni-transfer-fg2cg"})


def ni_transfer_cg2fg(e: cg.CGExpr, cfg: NIConfig) -> Verdict:
    """Translate a CG NI program to FG and run the FG oracle on ``(app e_t ())``."""
    lattice = cfg.observer.lattice
    result = cg2fg_expr(cfg.context(), e, lattice)
    if not isinstance(result.source_type, cg.TSlio):
        raise CGTypeError("CG-sub", f"{pretty_cg_type(result.source_type)} is not a computation", getattr(e, "pos", None))
    program = fg.App(result.target, fg.UnitLit())
    target_cfg = cfg.model_copy(update={"secret_type": cg2fg_type(cfg.context_type(), lattice)})
    verdict = ni_check_fg(program, target_cfg, pc=result.source_type.pc)
    return verdict.model_copy(update={"oracle": "ni-transfer-cg2fg"})


# ---------------------------------------------------------------------------
# Semantic preservation
# ---------------------------------------------------------------------------

def _attempt(run: Callable) -> Tuple[Optional[Any], Optional[EvalTimeout]]:
    try:
        return run(), None
    except EvalTimeout as exc:
        return None, exc


def agree_fg_cg(source: Any, target: Any, t: fg.FGType) -> bool:
    """
    Whether an FG value and a CG value coincide at FG type ``t`` under the
    FG-to-CG coding (every labeled position wrapped in ``Labeled``).

    Closures and locations are not compared.
    """
    if not isinstance(target, LabeledV):
        return False
    target = target.payload
    match t.body:
        case fg.TBool() | fg.TUnit():
            return source == target
        case fg.TProd(left, right):
            return (
                isinstance(source, PairV) and isinstance(target, PairV)
                and agree_fg_cg(source.left, target.left, left)
                and agree_fg_cg(source.right, target.right, right)
            )
        case fg.TSum(left, right):
            if isinstance(source, InlV) and isinstance(target, InlV):
                return agree_fg_cg(source.value, target.value, left)
            if isinstance(source, InrV) and isinstance(target, InrV):
                return agree_fg_cg(source.value, target.value, right)
            return False
    return True


def agree_cg_fg(source: Any, target: Any, t: cg.CGType) -> bool:
    """
    Whether a CG value and an FG value coincide at CG type ``t`` under the
    CG-to-FG coding (``Labeled`` values as ``inl``).

    Closures, computations and locations are not compared.
    """
    match t:
        case cg.TBool() | cg.TUnit():
            return source == target
        case cg.TProd(left, right):
            return (
                isinstance(source, PairV) and isinstance(target, PairV)
                and agree_cg_fg(source.left, target.left, left)
                and agree_cg_fg(source.right, target.right, right)
            )
        case cg.TSum(left, right):
            if isinstance(source, InlV) and isinstance(target, InlV):
                return agree_cg_fg(source.value, target.value, left)
            if isinstance(source, InrV) and isinstance(target, InrV):
                return agree_cg_fg(source.value, target.value, right)
            return False
        case cg.TLabeled(payload=payload):
            return (
                isinstance(source, LabeledV) and isinstance(target, InlV)
                and agree_cg_fg(source.payload, target.value, payload)
            )
    return True


def _compare(oracle: str, program: str, source, target, agree: Callable[[Any, Any], bool]) -> Verdict:
    (src, src_timeout), (tgt, tgt_timeout) = source, target
    if src_timeout and tgt_timeout:
        return passed(oracle, samples=1, timeouts=2, program=program, detail="both runs timed out")
    if src_timeout or tgt_timeout:
        which = "source" if src_timeout else "target"
        logger.warning(f"{oracle}: only the {which} run timed out on {program}")
        return inconclusive(oracle, samples=1, timeouts=1, program=program, detail=f"{which} timed out")
    if not agree(src.value, tgt.value) or len(src.heap) != len(tgt.heap):
        logger.warning(f"{oracle}: source gave {src.value}, target gave {tgt.value} on {program}")
        return failed(
            oracle, samples=1, program=program, result1=str(src.value), result2=str(tgt.value),
            detail=f"heap sizes {len(src.heap)} and {len(tgt.heap)}",
        )
    return passed(oracle, samples=1, program=program, result1=str(src.value))


def equiv_check_fg2cg(e: fg.FGExpr, fuel: Optional[int] = None, pc: Optional[Label] = None) -> Verdict:
    """
    Compare ``fg_eval(e)`` with forcing its translation.

    ``e`` must be closed. Results are compared through the ``Labeled``
    coding and heaps by number of allocated cells.
    """
    fuel = resolve_fuel(fuel)
    pc = pc or default_lattice().bottom
    result = fg2cg_expr({}, pc, e)
    source = _attempt(lambda: fg_eval(None, e, fuel=fuel))
    target = _attempt(lambda: cg_run(None, result.target, fuel=fuel))
    agree = lambda s, t: agree_fg_cg(s, t, result.source_type)  # noqa: E731
    return _compare("equiv-fg2cg", pretty_fg_expr(e), source, target, agree)


def _forcing_target(result) -> Tuple[fg.FGExpr, bool]:
    """The FG term whose evaluation mirrors running the CG source."""
    forced = isinstance(result.source_type, cg.TSlio)
    return (fg.App(result.target, fg.UnitLit()) if forced else result.target), forced


def equiv_check_cg2fg(e: cg.CGExpr, fuel: Optional[int] = None, lattice: Optional[Lattice] = None) -> Verdict:
    """
    Compare running ``e`` (forcing it when it is a computation) with
    evaluating its translation (applied to ``()`` in that case).

    A translated run that enters the dead ``inr`` branch of a bind, or ends
    in ``inr``, is a counterexample regardless of the result.
    """
    fuel = resolve_fuel(fuel)
    lattice = lattice or default_lattice()
    result = cg2fg_expr({}, e, lattice)
    program = pretty_cg_expr(e)
    target_expr, forced = _forcing_target(result)
    source = _attempt(lambda: cg_run(None, e, fuel=fuel))
    target = _attempt(lambda: fg_eval(None, target_expr, fuel=fuel))
    if target[0] is not None and target[0].dead_branch_hits:
        return failed("equiv-cg2fg", samples=1, program=program, detail="entered a dead inr branch")

    def agree(s: Any, t: Any) -> bool:
        if not forced:
            return agree_cg_fg(s, t, result.source_type)
        return isinstance(t, InlV) and agree_cg_fg(s, t.value, result.source_type.result)

    return _compare("equiv-cg2fg", program, source, target, agree)


def inr_check_cg2fg(
    e: cg.CGExpr,
    ctx: Optional[Mapping[str, cg.CGType]] = None,
    fuel: Optional[int] = None,
    lattice: Optional[Lattice] = None,
    seed: int = 0,
) -> Verdict:
    """
    Run a translated CG program with the dead-branch instrumentation.

    Free variables get generated CG inhabitants, encoded the way the
    translation codes them. Computations are run by applying the thunk to
    ``()`` and must end in ``inl``.
    """
    fuel = resolve_fuel(fuel)
    lattice = lattice or default_lattice()
    ctx = dict(ctx or {})
    result = cg2fg_expr(ctx, e, lattice)
    program = pretty_cg_expr(e)
    heap, env = encoded_env(ctx, seed)
    target_expr, forced = _forcing_target(result)
    try:
        run = fg_eval(heap, target_expr, env, fuel)
    except EvalTimeout:
        return inconclusive("inr-unreachable", samples=1, timeouts=1, program=program)
    if run.dead_branch_hits:
        return failed("inr-unreachable", samples=1, program=program, detail=f"{run.dead_branch_hits} dead branch entries")
    if forced and not isinstance(run.value, InlV):
        return failed("inr-unreachable", samples=1, program=program, result1=str(run.value))
    return passed("inr-unreachable", samples=1, program=program)


# ---------------------------------------------------------------------------
# Typing preservation
# ---------------------------------------------------------------------------

def typing_preservation_fg2cg(ctx: Mapping[str, fg.FGType], pc: Label, e: fg.FGExpr) -> Verdict:
    program = pretty_fg_expr(e)
    try:
        result = fg2cg_expr(ctx, pc, e)
        fg2cg_check(ctx, pc, result)
    except TranslationInvariantError as exc:
        logger.warning(f"typing-fg2cg: {exc} on {program}")
        return failed("typing-fg2cg", samples=1, program=program, detail=str(exc))
    return passed("typing-fg2cg", samples=1, program=program)


def typing_preservation_cg2fg(ctx: Mapping[str, cg.CGType], e: cg.CGExpr, lattice: Optional[Lattice] = None) -> Verdict:
    program = pretty_cg_expr(e)
    try:
        result = cg2fg_expr(ctx, e, lattice)
        cg2fg_check(ctx, result, lattice)
    except TranslationInvariantError as exc:
        logger.warning(f"typing-cg2fg: {exc} on {program}")
        return failed("typing-cg2fg", samples=1, program=program, detail=str(exc))
    return passed("typing-cg2fg", samples=1, program=program)


# ---------------------------------------------------------------------------
# Shrinking
# ---------------------------------------------------------------------------

def _subterms(e: Any, children: Callable) -> Iterable[Any]:
    for c in children(e):
        yield c
        yield from _subterms(c, children)


def shrink(e: Any, still_fails: Callable[[Any], bool], children: Callable, size: Callable) -> Any:
    """
    Greedy subterm minimization.

    Repeatedly replaces the program by its smallest proper subterm that
    still fails; subterms that do not typecheck are expected to make
    ``still_fails`` return False.
    """
    current = e
    while True:
        for candidate in sorted(_subterms(current, children), key=size):
            try:
                if still_fails(candidate):
                    current = candidate
                    break
            except IFCError:
                continue
        else:
            return current


def shrink_fg(e: fg.FGExpr, still_fails: Callable[[fg.FGExpr], bool]) -> fg.FGExpr:
    return shrink(e, still_fails, fg.children, fg.size)


def shrink_cg(e: cg.CGExpr, still_fails: Callable[[cg.CGExpr], bool]) -> cg.CGExpr:
    return shrink(e, still_fails, cg.children, cg.size)
