"""
Type-directed program generators.

A generator picks a goal type and builds a term downward, choosing at each
node a rule whose conclusion fits the goal and recursing into its premises.
Every construction yields a term whose synthesized type is a subtype of its
goal; the finished program is re-checked by the real typechecker, and an
attempt it rejects is logged and retried, so callers only ever see
well-typed programs.

Production choices that turn out impossible (for instance a reference at a
pc above its payload label) raise ``GenerationError`` and the generator
falls back to another production, and finally to the smallest term of the
goal type.
"""
import json
import logging
import random
from typing import Callable, List, Mapping, Optional

from ..cg import syntax as cg
from ..cg.checker import cg_typecheck
from ..cg.subtyping import cg_subtype
from ..core.config import HarnessConfig, default_lattice
from ..core.errors import GenerationError, TypeCheckError
from ..core.lattice import Label, Lattice
from ..core.names import FreshNames
from ..fg import syntax as fg
from ..fg.checker import fg_typecheck
from ..fg.subtyping import fg_subtype, protected
from ..surface.printer import pretty_cg_expr, pretty_cg_type, pretty_fg_expr, pretty_fg_type

logger = logging.getLogger(__name__)

# Productions tried per node before falling back to the smallest term
_TRIES = 4
# Chance of reusing a context variable's type for a let or scrutinee
_REUSE_CTX_TYPE = 0.3


def _rejected(lang: str, attempt: int, program: str, reason: str) -> None:
    logger.warning("GEN_REJECTED " + json.dumps({
        "lang": lang, "attempt": attempt, "reason": reason, "program": program,
    }))


def _closed_fg_type(pc: Label, e: fg.FGExpr) -> Optional[fg.FGType]:
    """
    Principal type of a closed term, else None.

    An unannotated ``new`` stores exactly this type. Open terms are skipped:
    while generating, variables carry their goal types, and the checker
    later sees their (smaller) actual types, which references do not absorb.
    """
    if fg.free_vars(e):
        return None
    try:
        return fg_typecheck({}, pc, e)
    except TypeCheckError:
        return None


def _closed_cg_type(e: cg.CGExpr, lattice: Lattice) -> Optional[cg.CGType]:
    if cg.free_vars(e):
        return None
    try:
        return cg_typecheck({}, e, lattice)
    except TypeCheckError:
        return None


def _split(rng: random.Random, budget: int, parts: int) -> List[int]:
    """Split ``budget`` into ``parts`` positive shares."""
    if budget <= parts:
        return [1] * parts
    cuts = sorted(rng.sample(range(1, budget), parts - 1))
    bounds = [0, *cuts, budget]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


class _LabelPicker:
    def __init__(self, rng: random.Random, lattice: Lattice):
        self.rng = rng
        self.lattice = lattice
        self.elements = lattice.elements()

    def any(self) -> Label:
        return self.rng.choice(self.elements)

    def below(self, bound: Label) -> Label:
        return self.rng.choice([l for l in self.elements if l.leq(bound)])

    def above(self, bound: Label) -> Label:
        return self.rng.choice([l for l in self.elements if bound.leq(l)])


# ---------------------------------------------------------------------------
# Random types
# ---------------------------------------------------------------------------

def gen_fg_type(rng: random.Random, lattice: Lattice, depth: int) -> fg.FGType:
    labels = _LabelPicker(rng, lattice)
    kinds = ["bool", "unit"] + (["bool", "prod", "sum", "fun", "ref"] if depth > 0 else [])
    kind = rng.choice(kinds)
    sub = lambda: gen_fg_type(rng, lattice, depth - 1)  # noqa: E731
    match kind:
        case "bool":
            body = fg.TBool()
        case "unit":
            body = fg.TUnit()
        case "prod":
            body = fg.TProd(sub(), sub())
        case "sum":
            body = fg.TSum(sub(), sub())
        case "fun":
            body = fg.TFun(sub(), labels.any(), sub())
        case _:
            body = fg.TRef(sub())
    return fg.FGType(body, labels.any())


def gen_cg_type(rng: random.Random, lattice: Lattice, depth: int) -> cg.CGType:
    labels = _LabelPicker(rng, lattice)
    kinds = ["bool", "unit"] + (["labeled", "slio", "prod", "sum", "fun", "ref"] if depth > 0 else [])
    kind = rng.choice(kinds)
    sub = lambda: gen_cg_type(rng, lattice, depth - 1)  # noqa: E731
    match kind:
        case "bool":
            return cg.TBool()
        case "unit":
            return cg.TUnit()
        case "labeled":
            return cg.TLabeled(labels.any(), sub())
        case "slio":
            return cg.TSlio(labels.any(), labels.any(), sub())
        case "prod":
            return cg.TProd(sub(), sub())
        case "sum":
            return cg.TSum(sub(), sub())
        case "fun":
            return cg.TFun(sub(), sub())
    return cg.TRef(labels.any(), sub())


# ---------------------------------------------------------------------------
# FG
# ---------------------------------------------------------------------------

class _FGGen:
    def __init__(self, rng: random.Random, lattice: Lattice, names: FreshNames, type_depth: int):
        self.rng = rng
        self.lattice = lattice
        self.labels = _LabelPicker(rng, lattice)
        self.names = names
        self.type_depth = type_depth

    def _type(self, ctx: dict) -> fg.FGType:
        if ctx and self.rng.random() < _REUSE_CTX_TYPE:
            return ctx[self.rng.choice(sorted(ctx))]
        return gen_fg_type(self.rng, self.lattice, self.type_depth)

    def _candidates(self, ctx: dict, goal: fg.FGType) -> List[str]:
        return sorted(x for x, t in ctx.items() if fg_subtype(t, goal))

    def gen(self, ctx: dict, pc: Label, goal: fg.FGType, budget: int) -> fg.FGExpr:
        if budget <= 1:
            return self.minimal(ctx, pc, goal)
        options: List[Callable] = [self._intro, self._if, self._case, self._app, self._proj, self._let, self._deref]
        if isinstance(goal.body, fg.TBool):
            options.append(self._prim)
        if isinstance(goal.body, fg.TUnit):
            options += [self._assign, self._assign]
        if self._candidates(ctx, goal):
            options.append(self._var)
        self.rng.shuffle(options)
        for option in options[:_TRIES]:
            try:
                return option(ctx, pc, goal, budget - 1)
            except GenerationError:
                continue
        return self.minimal(ctx, pc, goal)

    def minimal(self, ctx: dict, pc: Label, goal: fg.FGType) -> fg.FGExpr:
        """Smallest term of the goal type: a variable when one fits, else introduction forms."""
        candidates = self._candidates(ctx, goal)
        if candidates:
            return fg.Var(self.rng.choice(candidates))
        match goal.body:
            case fg.TBool():
                return fg.BoolLit(self.rng.random() < 0.5)
            case fg.TUnit():
                return fg.UnitLit()
            case fg.TFun(arg, latent, result):
                x = self.names.fresh("x")
                return fg.Lam(x, arg, latent, self.minimal({**ctx, x: arg}, latent, result))
            case fg.TProd(left, right):
                return fg.Pair(self.minimal(ctx, pc, left), self.minimal(ctx, pc, right))
            case fg.TSum(left, right):
                sides = [(fg.Inl, left), (fg.Inr, right)]
                self.rng.shuffle(sides)
                for cls, component in sides:
                    try:
                        return cls(goal.body, self.minimal(ctx, pc, component))
                    except GenerationError:
                        continue
                raise GenerationError(f"no inhabitant of {pretty_fg_type(goal)} at pc {pc}")
            case fg.TRef(payload):
                if not protected(payload, pc):
                    raise GenerationError(f"cannot allocate {pretty_fg_type(payload)} at pc {pc}")
                return fg.New(self.minimal(ctx, pc, payload), payload)
        raise GenerationError(f"unknown goal {goal!r}")

    # -- productions --------------------------------------------------------

    def _var(self, ctx, pc, goal, budget):
        return fg.Var(self.rng.choice(self._candidates(ctx, goal)))

    def _intro(self, ctx, pc, goal, budget):
        rng = self.rng
        match goal.body:
            case fg.TBool() | fg.TUnit():
                return self.minimal({}, pc, goal)
            case fg.TFun(arg, latent, result):
                x = self.names.fresh("x")
                return fg.Lam(x, arg, latent, self.gen({**ctx, x: arg}, latent, result, budget))
            case fg.TProd(left, right):
                b1, b2 = _split(rng, budget, 2)
                return fg.Pair(self.gen(ctx, pc, left, b1), self.gen(ctx, pc, right, b2))
            case fg.TSum(left, right):
                if rng.random() < 0.5:
                    return fg.Inl(goal.body, self.gen(ctx, pc, left, budget))
                return fg.Inr(goal.body, self.gen(ctx, pc, right, budget))
            case fg.TRef(payload):
                if not protected(payload, pc):
                    raise GenerationError("payload below pc")
                inner = self.gen(ctx, pc, payload, budget)
                if rng.random() < 0.5 and _closed_fg_type(pc, inner) == payload:
                    return fg.New(inner)
                return fg.New(inner, payload)
        raise GenerationError(f"unknown goal {goal!r}")

    def _if(self, ctx, pc, goal, budget):
        b1, b2, b3 = _split(self.rng, budget, 3)
        lc = self.labels.below(goal.label)
        inner = pc.join(lc)
        cond = self.gen(ctx, pc, fg.FGType(fg.TBool(), lc), b1)
        return fg.If(cond, self.gen(ctx, inner, goal, b2), self.gen(ctx, inner, goal, b3))

    def _case(self, ctx, pc, goal, budget):
        b1, b2, b3 = _split(self.rng, budget, 3)
        lc = self.labels.below(goal.label)
        scrutinee_type = fg.FGType(fg.TSum(self._type(ctx), self._type(ctx)), lc)
        scrutinee = self.gen(ctx, pc, scrutinee_type, b1)
        inner = pc.join(lc)
        lv, rv = self.names.fresh("l"), self.names.fresh("r")
        left = self.gen({**ctx, lv: scrutinee_type.body.left}, inner, goal, b2)
        right = self.gen({**ctx, rv: scrutinee_type.body.right}, inner, goal, b3)
        return fg.Case(scrutinee, lv, left, rv, right)

    def _app(self, ctx, pc, goal, budget):
        b1, b2 = _split(self.rng, budget, 2)
        arg_type = self._type(ctx)
        lf = self.labels.below(goal.label)
        latent = self.labels.above(lf.join(pc))
        fn = self.gen(ctx, pc, fg.FGType(fg.TFun(arg_type, latent, goal), lf), b1)
        return fg.App(fn, self.gen(ctx, pc, arg_type, b2))

    def _proj(self, ctx, pc, goal, budget):
        lc = self.labels.below(goal.label)
        other = self._type(ctx)
        if self.rng.random() < 0.5:
            return fg.Fst(self.gen(ctx, pc, fg.FGType(fg.TProd(goal, other), lc), budget))
        return fg.Snd(self.gen(ctx, pc, fg.FGType(fg.TProd(other, goal), lc), budget))

    def _let(self, ctx, pc, goal, budget):
        b1, b2 = _split(self.rng, budget, 2)
        bound_type = self._type(ctx)
        x = self.names.fresh("y")
        bound = self.gen(ctx, pc, bound_type, b1)
        return fg.Let(x, bound, self.gen({**ctx, x: bound_type}, pc, goal, b2))

    def _deref(self, ctx, pc, goal, budget):
        lc = self.labels.below(goal.label)
        payload = fg.FGType(goal.body, self.labels.below(goal.label))
        return fg.Deref(self.gen(ctx, pc, fg.FGType(fg.TRef(payload), lc), budget))

    def _prim(self, ctx, pc, goal, budget):
        op = self.rng.choice(sorted(fg.PRIM_ARITY))
        arity = fg.PRIM_ARITY[op]
        shares = _split(self.rng, budget, arity)
        args = tuple(
            self.gen(ctx, pc, fg.FGType(fg.TBool(), self.labels.below(goal.label)), b)
            for b in shares
        )
        return fg.Prim(op, args)

    def _assign(self, ctx, pc, goal, budget):
        b1, b2 = _split(self.rng, budget, 2)
        lt = self.labels.any()
        payload = self._type({})
        payload = fg.FGType(payload.body, self.labels.above(pc.join(lt)))
        target = self.gen(ctx, pc, fg.FGType(fg.TRef(payload), lt), b1)
        return fg.Assign(target, self.gen(ctx, pc, payload, b2))


# ---------------------------------------------------------------------------
# CG
# ---------------------------------------------------------------------------

class _CGGen:
    def __init__(self, rng: random.Random, lattice: Lattice, names: FreshNames, type_depth: int):
        self.rng = rng
        self.lattice = lattice
        self.labels = _LabelPicker(rng, lattice)
        self.names = names
        self.type_depth = type_depth

    def _type(self, ctx: dict) -> cg.CGType:
        if ctx and self.rng.random() < _REUSE_CTX_TYPE:
            return ctx[self.rng.choice(sorted(ctx))]
        return gen_cg_type(self.rng, self.lattice, self.type_depth)

    def _candidates(self, ctx: dict, goal: cg.CGType) -> List[str]:
        return sorted(x for x, t in ctx.items() if cg_subtype(t, goal))

    def gen(self, ctx: dict, goal: cg.CGType, budget: int) -> cg.CGExpr:
        if budget <= 1:
            return self.minimal(ctx, goal)
        options: List[Callable] = [self._intro, self._if, self._case, self._app, self._proj, self._let]
        if isinstance(goal, cg.TSlio):
            options += [self._bind, self._bind, self._unlabel, self._effect]
            if isinstance(goal.result, cg.TLabeled):
                options.append(self._to_labeled)
        if self._candidates(ctx, goal):
            options.append(self._var)
        self.rng.shuffle(options)
        for option in options[:_TRIES]:
            try:
                return option(ctx, goal, budget - 1)
            except GenerationError:
                continue
        return self.minimal(ctx, goal)

    def minimal(self, ctx: dict, goal: cg.CGType) -> cg.CGExpr:
        candidates = self._candidates(ctx, goal)
        if candidates:
            return cg.Var(self.rng.choice(candidates))
        match goal:
            case cg.TBool():
                return cg.BoolLit(self.rng.random() < 0.5)
            case cg.TUnit():
                return cg.UnitLit()
            case cg.TFun(arg, result):
                x = self.names.fresh("x")
                return cg.Lam(x, arg, self.minimal({**ctx, x: arg}, result))
            case cg.TProd(left, right):
                return cg.Pair(self.minimal(ctx, left), self.minimal(ctx, right))
            case cg.TSum(left, right):
                sides = [(cg.Inl, left), (cg.Inr, right)]
                self.rng.shuffle(sides)
                for cls, component in sides:
                    try:
                        return cls(goal, self.minimal(ctx, component))
                    except GenerationError:
                        continue
                raise GenerationError(f"no inhabitant of {pretty_cg_type(goal)}")
            case cg.TLabeled(label, payload):
                return cg.LabelE(label, self.minimal(ctx, payload))
            case cg.TSlio(pc, _, cg.TRef(label, payload)) if pc.leq(label):
                cell = cg.TLabeled(label, payload)
                return cg.New(self.minimal(ctx, cell), cell)
            case cg.TSlio(result=result):
                return cg.Ret(self.minimal(ctx, result))
            case cg.TRef():
                raise GenerationError("references have no pure introduction form")
        raise GenerationError(f"unknown goal {goal!r}")

    # -- productions --------------------------------------------------------

    def _var(self, ctx, goal, budget):
        return cg.Var(self.rng.choice(self._candidates(ctx, goal)))

    def _intro(self, ctx, goal, budget):
        rng = self.rng
        match goal:
            case cg.TBool() | cg.TUnit():
                return self.minimal({}, goal)
            case cg.TFun(arg, result):
                x = self.names.fresh("x")
                return cg.Lam(x, arg, self.gen({**ctx, x: arg}, result, budget))
            case cg.TProd(left, right):
                b1, b2 = _split(rng, budget, 2)
                return cg.Pair(self.gen(ctx, left, b1), self.gen(ctx, right, b2))
            case cg.TSum(left, right):
                if rng.random() < 0.5:
                    return cg.Inl(goal, self.gen(ctx, left, budget))
                return cg.Inr(goal, self.gen(ctx, right, budget))
            case cg.TLabeled(label, payload):
                return cg.LabelE(self.labels.below(label), self.gen(ctx, payload, budget))
            case cg.TSlio(result=result):
                return cg.Ret(self.gen(ctx, result, budget))
        raise GenerationError(f"no introduction form for {pretty_cg_type(goal)}")

    def _if(self, ctx, goal, budget):
        b1, b2, b3 = _split(self.rng, budget, 3)
        cond = self.gen(ctx, cg.TBool(), b1)
        return cg.If(cond, self.gen(ctx, goal, b2), self.gen(ctx, goal, b3))

    def _case(self, ctx, goal, budget):
        b1, b2, b3 = _split(self.rng, budget, 3)
        scrutinee_type = cg.TSum(self._type(ctx), self._type(ctx))
        scrutinee = self.gen(ctx, scrutinee_type, b1)
        lv, rv = self.names.fresh("l"), self.names.fresh("r")
        left = self.gen({**ctx, lv: scrutinee_type.left}, goal, b2)
        right = self.gen({**ctx, rv: scrutinee_type.right}, goal, b3)
        return cg.Case(scrutinee, lv, left, rv, right)

    def _app(self, ctx, goal, budget):
        b1, b2 = _split(self.rng, budget, 2)
        arg_type = self._type(ctx)
        fn = self.gen(ctx, cg.TFun(arg_type, goal), b1)
        return cg.App(fn, self.gen(ctx, arg_type, b2))

    def _proj(self, ctx, goal, budget):
        other = self._type(ctx)
        if self.rng.random() < 0.5:
            return cg.Fst(self.gen(ctx, cg.TProd(goal, other), budget))
        return cg.Snd(self.gen(ctx, cg.TProd(other, goal), budget))

    def _let(self, ctx, goal, budget):
        b1, b2 = _split(self.rng, budget, 2)
        bound_type = self._type(ctx)
        x = self.names.fresh("y")
        bound = self.gen(ctx, bound_type, b1)
        return cg.Let(x, bound, self.gen({**ctx, x: bound_type}, goal, b2))

    def _bind(self, ctx, goal: cg.TSlio, budget):
        b1, b2 = _split(self.rng, budget, 2)
        t1 = self.labels.below(goal.taint)
        if self.rng.random() < 0.3:
            # Allocate first so the continuation has a cell to work with.
            value_type = cg.TRef(self.labels.above(goal.pc), self._type({}))
        else:
            value_type = self._type(ctx)
        pc2 = self.labels.above(goal.pc.join(t1))
        m = self.gen(ctx, cg.TSlio(goal.pc, t1, value_type), b1)
        x = self.names.fresh("a")
        k = self.gen({**ctx, x: value_type}, cg.TSlio(pc2, goal.taint, goal.result), b2)
        return cg.Bind(m, x, k)

    def _unlabel(self, ctx, goal: cg.TSlio, budget):
        label = self.labels.below(goal.taint)
        return cg.Unlabel(self.gen(ctx, cg.TLabeled(label, goal.result), budget))

    def _to_labeled(self, ctx, goal: cg.TSlio, budget):
        inner = cg.TSlio(goal.pc, goal.result.label, goal.result.payload)
        return cg.ToLabeled(self.gen(ctx, inner, budget))

    def _effect(self, ctx, goal: cg.TSlio, budget):
        """new, deref or assign, whichever fits the goal's result."""
        rng = self.rng
        match goal.result:
            case cg.TRef(label, payload) if goal.pc.leq(label):
                cell = cg.TLabeled(label, payload)
                inner = self.gen(ctx, cell, budget)
                if rng.random() < 0.5 and _closed_cg_type(inner, self.lattice) == cell:
                    return cg.New(inner)
                return cg.New(inner, cell)
            case cg.TLabeled(label, payload):
                return cg.Deref(self.gen(ctx, cg.TRef(label, payload), budget))
            case cg.TUnit():
                b1, b2 = _split(rng, budget, 2)
                label = self.labels.above(goal.pc)
                payload = self._type({})
                target = self.gen(ctx, cg.TRef(label, payload), b1)
                return cg.Assign(target, self.gen(ctx, cg.TLabeled(label, payload), b2))
        raise GenerationError(f"no effect produces {pretty_cg_type(goal)}")


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def gen_fg_program(
    size: Optional[int] = None,
    ctx: Optional[Mapping[str, fg.FGType]] = None,
    pc: Optional[Label] = None,
    seed: Optional[int] = None,
    goal: Optional[fg.FGType] = None,
    lattice: Optional[Lattice] = None,
) -> fg.FGExpr:
    """
    Generate an FG program accepted by ``fg_typecheck(ctx, pc, ·)``.

    Args:
        size: node budget (default ``HarnessConfig.GEN_SIZE``)
        ctx: typing context of the program's free variables
        pc: program counter label (default ⊥)
        seed: makes generation deterministic (default ``HarnessConfig.SEED``)
        goal: type the program must have a subtype of; random when omitted
        lattice: label lattice (default from ``pc`` or the configuration)

    Raises:
        GenerationError: no derivation closed within ``HarnessConfig.GEN_ATTEMPTS`` attempts
    """
    lattice = lattice or (pc.lattice if pc is not None else default_lattice())
    pc = pc or lattice.bottom
    size = HarnessConfig.GEN_SIZE if size is None else size
    if size < 1:
        raise ValueError("size must be at least 1")
    rng = random.Random(HarnessConfig.SEED if seed is None else seed)
    ctx = dict(ctx or {})
    for attempt in range(HarnessConfig.GEN_ATTEMPTS):
        target = goal or gen_fg_type(rng, lattice, HarnessConfig.TYPE_DEPTH)
        generator = _FGGen(rng, lattice, FreshNames(ctx), HarnessConfig.TYPE_DEPTH)
        try:
            e = generator.gen(ctx, pc, target, size)
        except GenerationError as exc:
            logger.debug(f"gen_fg_program attempt {attempt} failed: {exc}")
            continue
        try:
            actual = fg_typecheck(ctx, pc, e)
        except TypeCheckError as exc:
            _rejected("fg", attempt, pretty_fg_expr(e), str(exc))
            continue
        if not fg_subtype(actual, target):
            _rejected("fg", attempt, pretty_fg_expr(e), f"type {pretty_fg_type(actual)} not below {pretty_fg_type(target)}")
            continue
        return e
    raise GenerationError(f"no FG program after {HarnessConfig.GEN_ATTEMPTS} attempts")


def gen_cg_program(
    size: Optional[int] = None,
    ctx: Optional[Mapping[str, cg.CGType]] = None,
    seed: Optional[int] = None,
    goal: Optional[cg.CGType] = None,
    lattice: Optional[Lattice] = None,
) -> cg.CGExpr:
    """
    Generate a CG program accepted by ``cg_typecheck(ctx, ·)``.

    Random goals are computations (``SLIO``) most of the time so bind,
    toLabeled and heap operations get exercised.

    Raises:
        GenerationError: no derivation closed within ``HarnessConfig.GEN_ATTEMPTS`` attempts
    """
    lattice = lattice or default_lattice()
    size = HarnessConfig.GEN_SIZE if size is None else size
    if size < 1:
        raise ValueError("size must be at least 1")
    rng = random.Random(HarnessConfig.SEED if seed is None else seed)
    ctx = dict(ctx or {})
    labels = _LabelPicker(rng, lattice)
    for attempt in range(HarnessConfig.GEN_ATTEMPTS):
        target = goal
        if target is None:
            result = gen_cg_type(rng, lattice, HarnessConfig.TYPE_DEPTH)
            target = cg.TSlio(labels.any(), labels.any(), result) if rng.random() < 0.8 else result
        generator = _CGGen(rng, lattice, FreshNames(ctx), HarnessConfig.TYPE_DEPTH)
        try:
            e = generator.gen(ctx, target, size)
        except GenerationError as exc:
            logger.debug(f"gen_cg_program attempt {attempt} failed: {exc}")
            continue
        try:
            actual = cg_typecheck(ctx, e, lattice)
        except TypeCheckError as exc:
            _rejected("cg", attempt, pretty_cg_expr(e), str(exc))
            continue
        if not cg_subtype(actual, target):
            _rejected("cg", attempt, pretty_cg_expr(e), f"type {pretty_cg_type(actual)} not below {pretty_cg_type(target)}")
            continue
        return e
    raise GenerationError(f"no CG program after {HarnessConfig.GEN_ATTEMPTS} attempts")
