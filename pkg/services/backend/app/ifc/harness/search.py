"""
Declarative derivation search.

The algorithmic checkers fold subsumption into elimination sites. This
module does the opposite: it applies the declarative rules literally,
with subsumption at every node, and computes the *set* of types a term
can be given. The set is finite because labels range over a finite
lattice and types are never larger than the ones the term mentions; it
is upward closed under subtyping.

Comparing the set with the checker's answer gives two checks:

- typability: the checker accepts a term iff the set is non-empty;
- principality: the synthesized type is in the set and below every
  member of it.

Reference payloads are compared covariantly in the principality check.
An unannotated ``new`` may allocate at any derivable payload and
invariant references make those types incomparable, so no single type
is below all of them.

Only suitable for small terms: sets grow with the number of label
positions in a type.
"""
import itertools
import logging
from typing import Callable, FrozenSet, Iterable, Mapping, Optional, Set

from ..cg import syntax as cg
from ..cg.checker import cg_typecheck
from ..core.config import default_lattice
from ..core.errors import TypeCheckError
from ..core.lattice import Label, Lattice
from ..fg import syntax as fg
from ..fg.checker import fg_typecheck
from ..fg.subtyping import protected, raise_label
from ..surface.printer import pretty_cg_type, pretty_fg_type

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Label and type variation
# ---------------------------------------------------------------------------

def _above(label: Label) -> Iterable[Label]:
    return [l for l in label.lattice.elements() if label.leq(l)]


def _below(label: Label) -> Iterable[Label]:
    return [l for l in label.lattice.elements() if l.leq(label)]


def fg_supertypes(t: fg.FGType) -> FrozenSet[fg.FGType]:
    """Every FG type ``τ′`` with ``t <: τ′``."""
    return frozenset(
        fg.FGType(body, label)
        for body in _fg_bodies(t.body, upper=True)
        for label in _above(t.label)
    )


def fg_subtypes(t: fg.FGType) -> FrozenSet[fg.FGType]:
    """Every FG type ``τ′`` with ``τ′ <: t``."""
    return frozenset(
        fg.FGType(body, label)
        for body in _fg_bodies(t.body, upper=False)
        for label in _below(t.label)
    )


def _fg_bodies(a: fg.FGUnlabeledType, upper: bool):
    same = fg_supertypes if upper else fg_subtypes
    dual = fg_subtypes if upper else fg_supertypes
    match a:
        case fg.TFun(arg, latent, result):
            latents = _below(latent) if upper else _above(latent)
            return [
                fg.TFun(x, l, r)
                for x, l, r in itertools.product(dual(arg), latents, same(result))
            ]
        case fg.TProd(left, right):
            return [fg.TProd(x, y) for x, y in itertools.product(same(left), same(right))]
        case fg.TSum(left, right):
            return [fg.TSum(x, y) for x, y in itertools.product(same(left), same(right))]
    return [a]


def cg_supertypes(t: cg.CGType) -> FrozenSet[cg.CGType]:
    """Every CG type ``τ′`` with ``t <: τ′``."""
    return frozenset(_cg_variants(t, upper=True))


def cg_subtypes(t: cg.CGType) -> FrozenSet[cg.CGType]:
    return frozenset(_cg_variants(t, upper=False))


def _cg_variants(t: cg.CGType, upper: bool):
    same = cg_supertypes if upper else cg_subtypes
    dual = cg_subtypes if upper else cg_supertypes
    co = _above if upper else _below
    contra = _below if upper else _above
    match t:
        case cg.TFun(arg, result):
            return [cg.TFun(x, r) for x, r in itertools.product(dual(arg), same(result))]
        case cg.TProd(left, right):
            return [cg.TProd(x, y) for x, y in itertools.product(same(left), same(right))]
        case cg.TSum(left, right):
            return [cg.TSum(x, y) for x, y in itertools.product(same(left), same(right))]
        case cg.TLabeled(label, payload):
            return [cg.TLabeled(l, p) for l, p in itertools.product(co(label), same(payload))]
        case cg.TSlio(pc, taint, result):
            return [
                cg.TSlio(p, k, r)
                for p, k, r in itertools.product(contra(pc), co(taint), same(result))
            ]
    return [t]


def _close(types: Iterable, supertypes: Callable) -> frozenset:
    out: Set = set()
    for t in types:
        if t not in out:
            out |= supertypes(t)
    return frozenset(out)


def _ctx_key(ctx: Mapping) -> tuple:
    return tuple(sorted(ctx.items(), key=lambda kv: kv[0]))


# ---------------------------------------------------------------------------
# FG
# ---------------------------------------------------------------------------

class _FGSearch:
    def __init__(self, lattice: Lattice):
        self.bot = lattice.bottom
        self.memo = {}

    def sup(self, body: fg.FGUnlabeledType) -> frozenset:
        return fg_supertypes(fg.FGType(body, self.bot))

    def types(self, ctx: dict, pc: Label, e: fg.FGExpr) -> frozenset:
        key = (_ctx_key(ctx), pc, e)
        if key not in self.memo:
            self.memo[key] = frozenset(self._rule(ctx, pc, e))
        return self.memo[key]

    def _rule(self, ctx: dict, pc: Label, e: fg.FGExpr):
        match e:
            case fg.Var(name):
                return fg_supertypes(ctx[name]) if name in ctx else ()

            case fg.UnitLit():
                return self.sup(fg.TUnit())

            case fg.BoolLit():
                return self.sup(fg.TBool())

            case fg.Lam(param, param_type, latent, body):
                results = self.types({**ctx, param: param_type}, latent, body)
                return _close((fg.FGType(fg.TFun(param_type, latent, r), self.bot) for r in results), fg_supertypes)

            case fg.App(fn, arg):
                args = self.types(ctx, pc, arg)
                if not args:
                    return ()
                return {
                    t.body.result
                    for t in self.types(ctx, pc, fn)
                    if isinstance(t.body, fg.TFun)
                    and t.body.arg in args
                    and t.label.join(pc).leq(t.body.latent)
                    and protected(t.body.result, t.label)
                }

            case fg.Pair(left, right):
                lefts, rights = self.types(ctx, pc, left), self.types(ctx, pc, right)
                return _close((fg.FGType(fg.TProd(a, b), self.bot) for a in lefts for b in rights), fg_supertypes)

            case fg.Fst(inner) | fg.Snd(inner):
                out = set()
                for t in self.types(ctx, pc, inner):
                    if isinstance(t.body, fg.TProd):
                        component = t.body.left if isinstance(e, fg.Fst) else t.body.right
                        if protected(component, t.label):
                            out.add(component)
                return out

            case fg.Inl(annotation, inner) | fg.Inr(annotation, inner):
                expected = annotation.left if isinstance(e, fg.Inl) else annotation.right
                return self.sup(annotation) if expected in self.types(ctx, pc, inner) else ()

            case fg.Case(scrutinee, left_var, left, right_var, right):
                out = set()
                for t in self.types(ctx, pc, scrutinee):
                    if not isinstance(t.body, fg.TSum):
                        continue
                    inner_pc = pc.join(t.label)
                    both = (
                        self.types({**ctx, left_var: t.body.left}, inner_pc, left)
                        & self.types({**ctx, right_var: t.body.right}, inner_pc, right)
                    )
                    out |= {r for r in both if protected(r, t.label)}
                return out

            case fg.If(cond, then, orelse):
                out = set()
                for t in self.types(ctx, pc, cond):
                    if not isinstance(t.body, fg.TBool):
                        continue
                    inner_pc = pc.join(t.label)
                    both = self.types(ctx, inner_pc, then) & self.types(ctx, inner_pc, orelse)
                    out |= {r for r in both if protected(r, t.label)}
                return out

            case fg.Let(var, bound, body):
                out = set()
                for t in self.types(ctx, pc, bound):
                    out |= self.types({**ctx, var: t}, pc, body)
                return out

            case fg.Prim(op, args):
                if fg.PRIM_ARITY.get(op) != len(args):
                    return ()
                choices = [
                    [t.label for t in self.types(ctx, pc, a) if isinstance(t.body, fg.TBool)]
                    for a in args
                ]
                return _close(
                    (fg.FGType(fg.TBool(), self.bot.lattice.join_all(ls)) for ls in itertools.product(*choices)),
                    fg_supertypes,
                )

            case fg.New(inner, annotation):
                payloads = self.types(ctx, pc, inner)
                if annotation is not None:
                    payloads = {annotation} & payloads
                return _close(
                    (fg.FGType(fg.TRef(p), self.bot) for p in payloads if protected(p, pc)),
                    fg_supertypes,
                )

            case fg.Deref(inner):
                return _close(
                    (
                        raise_label(t.body.payload, t.label)
                        for t in self.types(ctx, pc, inner)
                        if isinstance(t.body, fg.TRef)
                    ),
                    fg_supertypes,
                )

            case fg.Assign(target, value):
                values = self.types(ctx, pc, value)
                for t in self.types(ctx, pc, target):
                    if (
                        isinstance(t.body, fg.TRef)
                        and t.body.payload in values
                        and protected(t.body.payload, pc.join(t.label))
                    ):
                        return self.sup(fg.TUnit())
                return ()
        return ()


def fg_derivable(ctx: Mapping[str, fg.FGType], pc: Label, e: fg.FGExpr) -> FrozenSet[fg.FGType]:
    """
    Every type derivable for ``e`` under ``ctx`` at ``pc`` with the
    declarative rules (subsumption allowed at every node).

    Returns:
        An upward-closed set; empty when no derivation exists
    """
    return _FGSearch(pc.lattice).types(dict(ctx), pc, e)


def fg_subtype_covariant(t1: fg.FGType, t2: fg.FGType) -> bool:
    """FG subtyping with reference payloads compared covariantly."""
    if not t1.label.leq(t2.label):
        return False
    match t1.body, t2.body:
        case fg.TFun(a1, l1, r1), fg.TFun(a2, l2, r2):
            return fg_subtype_covariant(a2, a1) and l2.leq(l1) and fg_subtype_covariant(r1, r2)
        case (fg.TProd(x1, y1), fg.TProd(x2, y2)) | (fg.TSum(x1, y1), fg.TSum(x2, y2)):
            return fg_subtype_covariant(x1, x2) and fg_subtype_covariant(y1, y2)
        case fg.TRef(p1), fg.TRef(p2):
            return fg_subtype_covariant(p1, p2)
    return type(t1.body) is type(t2.body)


def check_fg_principality(ctx: Mapping[str, fg.FGType], pc: Label, e: fg.FGExpr) -> Optional[str]:
    """
    Compare the FG checker with declarative derivation search on ``e``.

    Returns:
        None when they agree, otherwise a description of the disagreement
    """
    derivable = fg_derivable(ctx, pc, e)
    try:
        principal = fg_typecheck(ctx, pc, e)
    except TypeCheckError as err:
        if derivable:
            witness = pretty_fg_type(min(derivable, key=lambda t: len(pretty_fg_type(t))))
            return f"checker rejects ({err.rule}) but the search derives {witness}"
        return None
    if not derivable:
        return f"checker synthesizes {pretty_fg_type(principal)} but the search finds no derivation"
    if principal not in derivable:
        return f"synthesized type {pretty_fg_type(principal)} is not derivable"
    for t in derivable:
        if not fg_subtype_covariant(principal, t):
            return f"synthesized type {pretty_fg_type(principal)} is not below derivable {pretty_fg_type(t)}"
    return None


# ---------------------------------------------------------------------------
# CG
# ---------------------------------------------------------------------------

class _CGSearch:
    def __init__(self, lattice: Lattice):
        self.bot, self.top = lattice.bottom, lattice.top
        self.memo = {}

    def types(self, ctx: dict, e: cg.CGExpr) -> frozenset:
        key = (_ctx_key(ctx), e)
        if key not in self.memo:
            self.memo[key] = frozenset(self._rule(ctx, e))
        return self.memo[key]

    def _slio(self, result: cg.CGType, pc: Optional[Label] = None, taint: Optional[Label] = None) -> frozenset:
        return cg_supertypes(cg.TSlio(pc or self.top, taint or self.bot, result))

    def _rule(self, ctx: dict, e: cg.CGExpr):
        match e:
            case cg.Var(name):
                return cg_supertypes(ctx[name]) if name in ctx else ()

            case cg.UnitLit():
                return {cg.TUnit()}

            case cg.BoolLit():
                return {cg.TBool()}

            case cg.Lam(param, param_type, body):
                results = self.types({**ctx, param: param_type}, body)
                return _close((cg.TFun(param_type, r) for r in results), cg_supertypes)

            case cg.App(fn, arg):
                args = self.types(ctx, arg)
                return {
                    t.result for t in self.types(ctx, fn)
                    if isinstance(t, cg.TFun) and t.arg in args
                }

            case cg.Pair(left, right):
                lefts, rights = self.types(ctx, left), self.types(ctx, right)
                return {cg.TProd(a, b) for a in lefts for b in rights}

            case cg.Fst(inner) | cg.Snd(inner):
                return {
                    (t.left if isinstance(e, cg.Fst) else t.right)
                    for t in self.types(ctx, inner)
                    if isinstance(t, cg.TProd)
                }

            case cg.Inl(annotation, inner) | cg.Inr(annotation, inner):
                expected = annotation.left if isinstance(e, cg.Inl) else annotation.right
                return cg_supertypes(annotation) if expected in self.types(ctx, inner) else ()

            case cg.Case(scrutinee, left_var, left, right_var, right):
                out = set()
                for t in self.types(ctx, scrutinee):
                    if isinstance(t, cg.TSum):
                        out |= self.types({**ctx, left_var: t.left}, left) & self.types({**ctx, right_var: t.right}, right)
                return out

            case cg.If(cond, then, orelse):
                if cg.TBool() not in self.types(ctx, cond):
                    return ()
                return self.types(ctx, then) & self.types(ctx, orelse)

            case cg.Let(var, bound, body):
                out = set()
                for t in self.types(ctx, bound):
                    out |= self.types({**ctx, var: t}, body)
                return out

            case cg.Prim(op, args):
                ok = cg.PRIM_ARITY.get(op) == len(args) and all(cg.TBool() in self.types(ctx, a) for a in args)
                return {cg.TBool()} if ok else ()

            case cg.Ret(inner):
                return _close((cg.TSlio(self.top, self.bot, t) for t in self.types(ctx, inner)), cg_supertypes)

            case cg.Bind(comp, var, body):
                out = set()
                for m in self.types(ctx, comp):
                    if not isinstance(m, cg.TSlio):
                        continue
                    for k in self.types({**ctx, var: m.result}, body):
                        # ℓ2 ⊑ ℓ3 and ℓ2 ⊑ ℓ4
                        if isinstance(k, cg.TSlio) and m.taint.leq(k.pc) and m.taint.leq(k.taint):
                            out.add(cg.TSlio(m.pc.meet(k.pc), k.taint, k.result))
                return _close(out, cg_supertypes)

            case cg.LabelE(label, inner):
                return _close((cg.TLabeled(label, t) for t in self.types(ctx, inner)), cg_supertypes)

            case cg.Unlabel(inner):
                return _close(
                    (
                        cg.TSlio(self.top, t.label, t.payload)
                        for t in self.types(ctx, inner)
                        if isinstance(t, cg.TLabeled)
                    ),
                    cg_supertypes,
                )

            case cg.ToLabeled(inner):
                return _close(
                    (
                        cg.TSlio(m.pc, self.bot, cg.TLabeled(m.taint, m.result))
                        for m in self.types(ctx, inner)
                        if isinstance(m, cg.TSlio)
                    ),
                    cg_supertypes,
                )

            case cg.New(inner, annotation):
                contents = self.types(ctx, inner)
                if annotation is not None:
                    contents = {annotation} & contents
                return _close(
                    (
                        cg.TSlio(t.label, self.bot, cg.TRef(t.label, t.payload))
                        for t in contents
                        if isinstance(t, cg.TLabeled)
                    ),
                    cg_supertypes,
                )

            case cg.Deref(inner):
                return _close(
                    (
                        cg.TSlio(self.top, self.bot, cg.TLabeled(r.label, r.payload))
                        for r in self.types(ctx, inner)
                        if isinstance(r, cg.TRef)
                    ),
                    cg_supertypes,
                )

            case cg.Assign(target, value):
                values = self.types(ctx, value)
                out = set()
                for r in self.types(ctx, target):
                    if isinstance(r, cg.TRef) and cg.TLabeled(r.label, r.payload) in values:
                        out |= self._slio(cg.TUnit(), pc=r.label)
                return out
        return ()


def cg_derivable(ctx: Mapping[str, cg.CGType], e: cg.CGExpr, lattice: Optional[Lattice] = None) -> FrozenSet[cg.CGType]:
    """
    Every type derivable for ``e`` under ``ctx`` with the declarative CG rules.

    The declarative bind rule takes any pc-label below both components'
    pc-labels and any taint above the first component's taint.
    """
    return _CGSearch(lattice or default_lattice()).types(dict(ctx), e)


def cg_subtype_covariant(t1: cg.CGType, t2: cg.CGType) -> bool:
    """CG subtyping with reference payloads compared covariantly."""
    match t1, t2:
        case cg.TFun(a1, r1), cg.TFun(a2, r2):
            return cg_subtype_covariant(a2, a1) and cg_subtype_covariant(r1, r2)
        case (cg.TProd(x1, y1), cg.TProd(x2, y2)) | (cg.TSum(x1, y1), cg.TSum(x2, y2)):
            return cg_subtype_covariant(x1, x2) and cg_subtype_covariant(y1, y2)
        case (cg.TRef(l1, p1), cg.TRef(l2, p2)) | (cg.TLabeled(l1, p1), cg.TLabeled(l2, p2)):
            return l1.leq(l2) and cg_subtype_covariant(p1, p2)
        case cg.TSlio(pc1, k1, r1), cg.TSlio(pc2, k2, r2):
            return pc2.leq(pc1) and k1.leq(k2) and cg_subtype_covariant(r1, r2)
    return type(t1) is type(t2) and isinstance(t1, (cg.TBool, cg.TUnit))


def check_cg_principality(
    ctx: Mapping[str, cg.CGType], e: cg.CGExpr, lattice: Optional[Lattice] = None
) -> Optional[str]:
    """
    Compare the CG checker with declarative derivation search on ``e``.

    Unannotated ``new`` fixes the pc-label of the allocation to the
    reference label, so principality is only meaningful for terms whose
    allocations are annotated.

    Returns:
        None when they agree, otherwise a description of the disagreement
    """
    lattice = lattice or default_lattice()
    derivable = cg_derivable(ctx, e, lattice)
    try:
        principal = cg_typecheck(ctx, e, lattice)
    except TypeCheckError as err:
        if derivable:
            witness = pretty_cg_type(min(derivable, key=lambda t: len(pretty_cg_type(t))))
            return f"checker rejects ({err.rule}) but the search derives {witness}"
        return None
    if not derivable:
        return f"checker synthesizes {pretty_cg_type(principal)} but the search finds no derivation"
    if principal not in derivable:
        return f"synthesized type {pretty_cg_type(principal)} is not derivable"
    for t in derivable:
        if not cg_subtype_covariant(principal, t):
            return f"synthesized type {pretty_cg_type(principal)} is not below derivable {pretty_cg_type(t)}"
    return None
