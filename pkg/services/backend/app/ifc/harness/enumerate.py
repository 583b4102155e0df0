"""
Exhaustive term enumeration by exact size.

Terms are built over a fixed annotation vocabulary so the search space
stays finite: lambda parameters, sum annotations and allocation
annotations are drawn from a handful of small types over the lattice's
bottom and top. Bound variables are named by binding depth, so
alpha-equivalent terms are produced once.

Allocations are always annotated. Without an annotation ``new`` has no
principal type (references are invariant), and a conditional whose
branches allocate at different payloads is typable declaratively but
rejected by the checker.

The sweeps run every enumerated term through the algorithmic checker and
the declarative derivation search and collect the disagreements.
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, List, Mapping, Optional, Tuple

from ..cg import syntax as cg
from ..cg.checker import cg_typecheck
from ..core.config import default_lattice
from ..core.errors import TypeCheckError
from ..core.lattice import Label, Lattice
from ..fg import syntax as fg
from ..fg.checker import fg_typecheck
from ..surface.printer import pretty_cg_expr, pretty_fg_expr
from .search import check_cg_principality, check_fg_principality

logger = logging.getLogger(__name__)


@dataclass
class SweepReport:
    """Counts of one sweep plus every ``(program, problem)`` disagreement."""

    checked: int = 0
    typable: int = 0
    disagreements: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def _split(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Compositions of ``total`` into ``parts`` positive sizes."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _split(total - first, parts - 1):
            yield (first,) + rest


def _binder(scope: Tuple[str, ...]) -> str:
    return f"v{len(scope)}"


# ---------------------------------------------------------------------------
# FG
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FGVocabulary:
    types: Tuple[fg.FGType, ...]
    latents: Tuple[Label, ...]
    sums: Tuple[fg.TSum, ...]


def fg_vocabulary(lattice: Optional[Lattice] = None) -> FGVocabulary:
    """``bool`` at ⊥ and ⊤, ``unit`` at ⊥, both latents, ``unit + unit``."""
    lattice = lattice or default_lattice()
    bot, top = lattice.bottom, lattice.top
    unit = fg.FGType(fg.TUnit(), bot)
    return FGVocabulary(
        types=(fg.FGType(fg.TBool(), bot), fg.FGType(fg.TBool(), top), unit),
        latents=(bot, top),
        sums=(fg.TSum(unit, unit),),
    )


def default_fg_context(lattice: Optional[Lattice] = None) -> dict:
    """A secret boolean and a public cell: ``x : bool^⊤``, ``r : (ref bool^⊥)^⊥``."""
    lattice = lattice or default_lattice()
    bot, top = lattice.bottom, lattice.top
    return {
        "x": fg.FGType(fg.TBool(), top),
        "r": fg.FGType(fg.TRef(fg.FGType(fg.TBool(), bot)), bot),
    }


def enumerate_fg(size: int, scope: Tuple[str, ...], vocab: FGVocabulary) -> Tuple[fg.FGExpr, ...]:
    """Every FG term with exactly ``size`` nodes whose free variables are in ``scope``."""
    return _fg_terms(size, tuple(scope), vocab)


@lru_cache(maxsize=None)
def _fg_terms(n: int, scope: Tuple[str, ...], vocab: FGVocabulary) -> Tuple[fg.FGExpr, ...]:
    if n < 1:
        return ()
    if n == 1:
        return tuple(fg.Var(x) for x in scope) + (fg.UnitLit(), fg.BoolLit(True), fg.BoolLit(False))
    v = _binder(scope)
    bound = scope + (v,)
    out: List[fg.FGExpr] = []

    def terms(k, names=scope):
        return _fg_terms(k, names, vocab)

    for e in terms(n - 1):
        out += [fg.Fst(e), fg.Snd(e), fg.Deref(e), fg.Prim("not", (e,))]
        out += [fg.Inl(s, e) for s in vocab.sums] + [fg.Inr(s, e) for s in vocab.sums]
        out += [fg.New(e, t) for t in vocab.types]
    for body in terms(n - 1, bound):
        out += [fg.Lam(v, t, l, body) for t in vocab.types for l in vocab.latents]

    for a, b in _split(n - 1, 2):
        for x, y in itertools.product(terms(a), terms(b)):
            out += [
                fg.App(x, y), fg.Pair(x, y), fg.Assign(x, y),
                fg.Prim("and", (x, y)), fg.Prim("or", (x, y)),
            ]
        for x, y in itertools.product(terms(a), terms(b, bound)):
            out.append(fg.Let(v, x, y))

    for a, b, c in _split(n - 1, 3):
        for x, y, z in itertools.product(terms(a), terms(b), terms(c)):
            out.append(fg.If(x, y, z))
        for x, y, z in itertools.product(terms(a), terms(b, bound), terms(c, bound)):
            out.append(fg.Case(x, v, y, v, z))
    return tuple(out)


def sweep_fg(
    max_size: int,
    ctx: Optional[Mapping[str, fg.FGType]] = None,
    pc: Optional[Label] = None,
    lattice: Optional[Lattice] = None,
) -> SweepReport:
    """
    Compare the FG checker with derivation search on every term up to ``max_size``.

    Args:
        max_size: largest term size, in AST nodes
        ctx: typing context (defaults to ``default_fg_context``)
        pc: program counter (defaults to ⊥)
        lattice: lattice for the vocabulary and the defaults
    """
    lattice = lattice or default_lattice()
    ctx = dict(ctx) if ctx is not None else default_fg_context(lattice)
    pc = pc or lattice.bottom
    vocab = fg_vocabulary(lattice)
    terms = (e for n in range(1, max_size + 1) for e in enumerate_fg(n, tuple(sorted(ctx)), vocab))
    return _sweep(
        "FG",
        terms,
        typecheck=lambda e: fg_typecheck(ctx, pc, e),
        principality=lambda e: check_fg_principality(ctx, pc, e),
        show=pretty_fg_expr,
    )


# ---------------------------------------------------------------------------
# CG
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CGVocabulary:
    types: Tuple[cg.CGType, ...]
    labels: Tuple[Label, ...]
    sums: Tuple[cg.TSum, ...]
    cells: Tuple[cg.TLabeled, ...]


def cg_vocabulary(lattice: Optional[Lattice] = None) -> CGVocabulary:
    """``bool``, ``unit``, ``Labeled ⊥/⊤ bool``, both labels and ``unit + unit``."""
    lattice = lattice or default_lattice()
    bot, top = lattice.bottom, lattice.top
    cells = (cg.TLabeled(bot, cg.TBool()), cg.TLabeled(top, cg.TBool()))
    return CGVocabulary(
        types=(cg.TBool(), cg.TUnit()) + cells,
        labels=(bot, top),
        sums=(cg.TSum(cg.TUnit(), cg.TUnit()),),
        cells=cells,
    )


def default_cg_context(lattice: Optional[Lattice] = None) -> dict:
    """``x : Labeled ⊤ bool``, ``r : ref ⊥ bool``."""
    lattice = lattice or default_lattice()
    return {
        "x": cg.TLabeled(lattice.top, cg.TBool()),
        "r": cg.TRef(lattice.bottom, cg.TBool()),
    }


def enumerate_cg(size: int, scope: Tuple[str, ...], vocab: CGVocabulary) -> Tuple[cg.CGExpr, ...]:
    """Every CG term with exactly ``size`` nodes whose free variables are in ``scope``."""
    return _cg_terms(size, tuple(scope), vocab)


@lru_cache(maxsize=None)
def _cg_terms(n: int, scope: Tuple[str, ...], vocab: CGVocabulary) -> Tuple[cg.CGExpr, ...]:
    if n < 1:
        return ()
    if n == 1:
        return tuple(cg.Var(x) for x in scope) + (cg.UnitLit(), cg.BoolLit(True), cg.BoolLit(False))
    v = _binder(scope)
    bound = scope + (v,)
    out: List[cg.CGExpr] = []

    def terms(k, names=scope):
        return _cg_terms(k, names, vocab)

    for e in terms(n - 1):
        out += [
            cg.Fst(e), cg.Snd(e), cg.Deref(e), cg.Prim("not", (e,)),
            cg.Ret(e), cg.Unlabel(e), cg.ToLabeled(e),
        ]
        out += [cg.Inl(s, e) for s in vocab.sums] + [cg.Inr(s, e) for s in vocab.sums]
        out += [cg.LabelE(l, e) for l in vocab.labels]
        out += [cg.New(e, c) for c in vocab.cells]
    for body in terms(n - 1, bound):
        out += [cg.Lam(v, t, body) for t in vocab.types]

    for a, b in _split(n - 1, 2):
        for x, y in itertools.product(terms(a), terms(b)):
            out += [
                cg.App(x, y), cg.Pair(x, y), cg.Assign(x, y),
                cg.Prim("and", (x, y)), cg.Prim("or", (x, y)),
            ]
        for x, y in itertools.product(terms(a), terms(b, bound)):
            out += [cg.Let(v, x, y), cg.Bind(x, v, y)]

    for a, b, c in _split(n - 1, 3):
        for x, y, z in itertools.product(terms(a), terms(b), terms(c)):
            out.append(cg.If(x, y, z))
        for x, y, z in itertools.product(terms(a), terms(b, bound), terms(c, bound)):
            out.append(cg.Case(x, v, y, v, z))
    return tuple(out)


def sweep_cg(
    max_size: int,
    ctx: Optional[Mapping[str, cg.CGType]] = None,
    lattice: Optional[Lattice] = None,
) -> SweepReport:
    """Compare the CG checker with derivation search on every term up to ``max_size``."""
    lattice = lattice or default_lattice()
    ctx = dict(ctx) if ctx is not None else default_cg_context(lattice)
    vocab = cg_vocabulary(lattice)
    terms = (e for n in range(1, max_size + 1) for e in enumerate_cg(n, tuple(sorted(ctx)), vocab))
    return _sweep(
        "CG",
        terms,
        typecheck=lambda e: cg_typecheck(ctx, e, lattice),
        principality=lambda e: check_cg_principality(ctx, e, lattice),
        show=pretty_cg_expr,
    )


def _sweep(lang: str, terms, typecheck: Callable, principality: Callable, show: Callable) -> SweepReport:
    report = SweepReport()
    for e in terms:
        report.checked += 1
        try:
            typecheck(e)
            report.typable += 1
        except TypeCheckError:
            pass
        problem = principality(e)
        if problem is not None:
            report.disagreements.append((show(e), problem))
            logger.warning(f"{lang} disagreement on {show(e)}: {problem}")
    logger.info(
        f"{lang} sweep: {report.checked} terms, {report.typable} typable, "
        f"{len(report.disagreements)} disagreements"
    )
    return report
