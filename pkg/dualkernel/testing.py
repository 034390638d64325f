"""Term enumerators, hypothesis strategies and a derivation generator.

The exhaustive enumerators are lazy generators; callers bound them by size
(and, where the counts grow quickly, with ``itertools.islice``).
"""

import itertools
import logging
from functools import lru_cache
from typing import Dict, Iterator, List, Tuple

from hypothesis import strategies as st

from dualkernel import lf_kernel as lf
from dualkernel.ctt_rules import Derivation, EqSet, EqVer, IsSet, SequentJudgement, Ver, formation
from dualkernel.syntax import (
    BULLET,
    EMPTY_CONTEXT,
    UNIT,
    VOID,
    Ap,
    Bound,
    Context,
    Expr,
    Lam,
    Pi,
    Var,
    abstract,
    arrow,
    free_vars,
    fresh_name,
    lam,
    open_scope,
    pi,
)

logger = logging.getLogger(__name__)

_LEAVES = (UNIT, VOID, BULLET)


# Computational terms


def exprs_of_size(size, depth=0) -> Iterator[Expr]:
    """Every term with exactly ``size`` nodes whose free indices are below ``depth``."""
    if size < 1:
        return
    if size <= 4:
        yield from _small_exprs(size, depth)
        return
    yield from (Lam(scope) for scope in exprs_of_size(size - 1, depth + 1))
    for left in range(1, size - 1):
        right = size - 1 - left
        for dom in exprs_of_size(left, depth):
            for scope in exprs_of_size(right, depth + 1):
                yield Pi(dom, scope)
        for fun in exprs_of_size(left, depth):
            for arg in exprs_of_size(right, depth):
                yield Ap(fun, arg)


@lru_cache(maxsize=None)
def _small_exprs(size, depth) -> Tuple[Expr, ...]:
    if size == 1:
        return _LEAVES + tuple(Bound(i) for i in range(depth))
    found: List[Expr] = [Lam(scope) for scope in _small_exprs(size - 1, depth + 1)]
    for left in range(1, size - 1):
        right = size - 1 - left
        found.extend(Pi(d, s) for d in _small_exprs(left, depth) for s in _small_exprs(right, depth + 1))
        found.extend(Ap(f, a) for f in _small_exprs(left, depth) for a in _small_exprs(right, depth))
    return tuple(found)


def closed_exprs(max_size) -> Iterator[Expr]:
    """All closed terms of size 1 through ``max_size``."""
    for size in range(1, max_size + 1):
        yield from exprs_of_size(size)


def finitary_types(depth) -> List[Expr]:
    """⊤, ⊥ and non-dependent arrows nested at most ``depth`` deep."""
    if depth == 0:
        return [UNIT, VOID]
    smaller = finitary_types(depth - 1)
    return [UNIT, VOID] + [arrow(a, b) for a in smaller for b in smaller]


def application_instances(max_body=3, max_arg=3, type_depth=1):
    """``(E, N, A, B)`` with ``E`` a scope over one variable and ``A``, ``B`` finitary."""
    types = finitary_types(type_depth)
    bodies = [e for size in range(1, max_body + 1) for e in exprs_of_size(size, 1)]
    args = list(closed_exprs(max_arg))
    for a, b in itertools.product(types, repeat=2):
        for body in bodies:
            for n in args:
                yield body, n, a, b


# Proof terms

ABORT_TARGETS = (lf.TOP, lf.BOT, lf.Fn(lf.TOP, lf.TOP))


def lf_types(depth, atoms=(), products=True) -> List[lf.LfType]:
    base = [lf.TOP, lf.BOT] + [lf.Atom(name) for name in atoms]
    if depth == 0:
        return base
    smaller = lf_types(depth - 1, atoms, products)
    formers = [lf.Fn] + ([lf.Prod] if products else [])
    return base + [former(a, b) for former in formers for a in smaller for b in smaller]


def lf_neutrals(size, scope, products=True) -> Iterator[lf.Neutral]:
    """Neutral terms of ``lf_size`` exactly ``size`` over the variables in ``scope``."""
    if size == 1:
        yield from (lf.NVar(name) for name in scope)
        return
    for left in range(1, size - 1):
        for head in lf_neutrals(left, scope, products):
            for arg in lf_normals(size - 1 - left, scope, products):
                yield lf.NApp(head, arg)
    if products:
        for pair in lf_neutrals(size - 1, scope, products):
            yield lf.NFst(pair)
            yield lf.NSnd(pair)


def lf_normals(size, scope=(), products=True) -> Iterator[lf.Normal]:
    """Normal terms of ``lf_size`` exactly ``size``; binders are named ``v0``, ``v1``, ..."""
    scope = tuple(scope)
    if size == 1:
        yield lf.NBullet()
    yield from (lf.NNeutral(r) for r in lf_neutrals(size, scope, products))
    if size < 2:
        return
    binder = f"v{len(scope)}"
    yield from (lf.NLam(binder, body) for body in lf_normals(size - 1, scope + (binder,), products))
    if products:
        for r in lf_neutrals(size - 1, scope, products):
            yield from (lf.NAbort(target, r) for target in ABORT_TARGETS)
        for left in range(1, size - 1):
            for m in lf_normals(left, scope, products):
                for n in lf_normals(size - 1 - left, scope, products):
                    yield lf.NPair(m, n)


def well_typed_normals(sig, ctx, ty, max_size, products=True) -> List[lf.Normal]:
    scope = tuple(ctx.names())
    return [
        m
        for size in range(1, max_size + 1)
        for m in lf_normals(size, scope, products)
        if lf.check(sig, ctx, m, ty)
    ]


def is_normal_form(m):
    """Whether ``m`` respects the normal/neutral stratification all the way down."""
    if isinstance(m, lf.NBullet):
        return True
    if isinstance(m, lf.NLam):
        return is_normal_form(m.body)
    if isinstance(m, lf.NPair):
        return is_normal_form(m.left) and is_normal_form(m.right)
    if isinstance(m, lf.NAbort):
        return _is_neutral_form(m.scrutinee)
    if isinstance(m, lf.NNeutral):
        return _is_neutral_form(m.neutral)
    return False


def _is_neutral_form(r):
    if isinstance(r, (lf.NVar, lf.NConst)):
        return True
    if isinstance(r, lf.NApp):
        return _is_neutral_form(r.fun) and is_normal_form(r.arg)
    if isinstance(r, (lf.NFst, lf.NSnd)):
        return _is_neutral_form(r.pair)
    return False


# Hypothesis strategies

NAMES = ("x", "y", "z")


def _close(e):
    for name in sorted(free_vars(e)):
        e = lam(name, e)
    return e


def exprs(names=NAMES, max_leaves=12):
    """Terms whose free variables are drawn from ``names``."""
    leaves = st.sampled_from(_LEAVES) | st.sampled_from([Var(name) for name in names])
    binder = st.sampled_from(names)
    return st.recursive(
        leaves,
        lambda children: st.one_of(
            st.builds(Ap, children, children),
            st.builds(lam, binder, children),
            st.builds(pi, children, binder, children),
        ),
        max_leaves=max_leaves,
    )


def closed_exprs_strategy(max_leaves=12):
    return exprs(max_leaves=max_leaves).map(_close)


def finitary_types_strategy(max_leaves=6):
    return st.recursive(
        st.sampled_from([UNIT, VOID]),
        lambda children: st.builds(arrow, children, children),
        max_leaves=max_leaves,
    )


def lf_types_strategy(atoms=(), products=True, max_leaves=6):
    leaves = st.sampled_from([lf.TOP, lf.BOT] + [lf.Atom(name) for name in atoms])
    formers = [lf.Fn, lf.Prod] if products else [lf.Fn]
    return st.recursive(
        leaves,
        lambda children: st.one_of(*(st.builds(former, children, children) for former in formers)),
        max_leaves=max_leaves,
    )


# Derivations


_AXIOMS = (
    ("UNIT-F", IsSet(UNIT)),
    ("UNIT-EQ-F", EqSet(UNIT, UNIT)),
    ("UNIT-I", Ver(BULLET, UNIT)),
    ("UNIT-EQ-I", EqVer(BULLET, BULLET, UNIT)),
    ("VOID-F", IsSet(VOID)),
    ("VOID-EQ-F", EqSet(VOID, VOID)),
)

_IDENTITY = lam("y", Var("y"))

VOID_ELIM_TARGETS = (
    Ver(BULLET, VOID),
    Ver(_IDENTITY, UNIT),
    EqVer(BULLET, _IDENTITY, UNIT),
)


def conclusions(d) -> Iterator[SequentJudgement]:
    """All conclusions of ``d`` in pre-order."""
    stack = [d]
    while stack:
        node = stack.pop()
        yield node.conclusion
        stack.extend(reversed(node.children))


def formation_evidence(ctx) -> Dict[str, Derivation]:
    """Typehood evidence for the entries of ``ctx`` that formation rules alone derive."""
    evidence = {}
    for position, (name, ty) in enumerate(ctx):
        witness = formation(ctx.prefix(position), ty)
        if witness is not None:
            evidence[name] = witness
    return evidence


class DerivationGenerator:
    """Every derivation up to a given depth that the catalog accepts.

    Derivations are kept one per conclusion, so ``generate`` returns a
    derivation for each derivable sequent rather than every way of deriving
    it. ``VOID-E`` concludes only the judgements in ``void_targets``.
    """

    def __init__(self, void_targets=VOID_ELIM_TARGETS):
        self.void_targets = tuple(void_targets)
        self._memo: Dict[Tuple[int, Context], List[Derivation]] = {}

    def generate(self, depth, ctx=EMPTY_CONTEXT) -> List[Derivation]:
        key = (depth, ctx)
        if key not in self._memo:
            self._memo[key] = self._generate(depth, ctx)
        return self._memo[key]

    def closed(self, depth) -> List[Derivation]:
        return self.generate(depth, EMPTY_CONTEXT)

    def _generate(self, depth, ctx):
        found: Dict[SequentJudgement, Derivation] = {}

        def add(rule, body, *children):
            conclusion = SequentJudgement(ctx, body)
            found.setdefault(conclusion, Derivation(rule, conclusion, children))

        for rule, body in _AXIOMS:
            add(rule, body)
        for name, ty in ctx:
            add("HYP", Ver(Var(name), ty))
        if depth <= 1:
            return list(found.values())

        below = self.generate(depth - 1, ctx)
        by_kind: Dict[type, List[Derivation]] = {kind: [] for kind in (IsSet, EqSet, Ver, EqVer)}
        for d in below:
            by_kind[type(d.conclusion.body)].append(d)
        is_set, eq_set, ver, eq_ver = (by_kind[k] for k in (IsSet, EqSet, Ver, EqVer))

        for p in ver:
            m, a = p.conclusion.body.m, p.conclusion.body.a
            add("REFL", EqVer(m, m, a), p)
            if a == VOID:
                for target in self.void_targets:
                    add("VOID-E", target, p)
        for p in eq_ver:
            body = p.conclusion.body
            add("SYM", EqVer(body.n, body.m, body.a), p)
            for q in eq_ver:
                other = q.conclusion.body
                if other.m == body.n and other.a == body.a:
                    add("TRANS", EqVer(body.m, other.n, body.a), p, q)
        for p in is_set:
            add("SET-REFL", EqSet(p.conclusion.body.a, p.conclusion.body.a), p)
        for p in eq_set:
            body = p.conclusion.body
            add("SET-SYM", EqSet(body.b, body.a), p)
            for q in eq_set:
                if q.conclusion.body.a == body.b:
                    add("SET-TRANS", EqSet(body.a, q.conclusion.body.b), p, q)
            for q in ver:
                if q.conclusion.body.a == body.a:
                    add("CONV", Ver(q.conclusion.body.m, body.b), q, p)
            for q in eq_ver:
                if q.conclusion.body.a == body.a:
                    other = q.conclusion.body
                    add("EQ-CONV", EqVer(other.m, other.n, body.b), q, p)
        self._eliminations(add, ver, eq_ver)
        self._introductions(add, depth, ctx, is_set, eq_set, ver)
        return list(found.values())

    @staticmethod
    def _eliminations(add, ver, eq_ver):
        for p in ver:
            fun_ty = p.conclusion.body.a
            if not isinstance(fun_ty, Pi):
                continue
            for q in ver:
                if q.conclusion.body.a == fun_ty.dom:
                    n = q.conclusion.body.m
                    add("PI-E", Ver(Ap(p.conclusion.body.m, n), open_scope(fun_ty.scope, n)), p, q)
        for p in eq_ver:
            fun_ty = p.conclusion.body.a
            if not isinstance(fun_ty, Pi):
                continue
            for q in eq_ver:
                if q.conclusion.body.a == fun_ty.dom:
                    left, right = p.conclusion.body, q.conclusion.body
                    add(
                        "PI-EQ-E",
                        EqVer(Ap(left.m, right.m), Ap(left.n, right.n), open_scope(fun_ty.scope, right.m)),
                        p,
                        q,
                    )

    def _introductions(self, add, depth, ctx, is_set, eq_set, ver):
        x = fresh_name("x", set(ctx.names()))
        for p in is_set:
            a = p.conclusion.body.a
            inner = self.generate(depth - 1, ctx.extend(x, a))
            for q in inner:
                body = q.conclusion.body
                if isinstance(body, IsSet):
                    add("PI-F", IsSet(Pi(a, abstract(x, body.a), x)), p, q)
                elif isinstance(body, Ver):
                    e, b = abstract(x, body.m), abstract(x, body.a)
                    add("PI-I", Ver(Lam(e, x), Pi(a, b, x)), q)
                    for r in ver:
                        if r.conclusion.body.a == a:
                            n = r.conclusion.body.m
                            add("PI-BETA", EqVer(Ap(Lam(e, x), n), open_scope(e, n), open_scope(b, n)), q, r)
                elif isinstance(body, EqVer):
                    add(
                        "PI-EQ-I",
                        EqVer(Lam(abstract(x, body.m), x), Lam(abstract(x, body.n), x), Pi(a, abstract(x, body.a), x)),
                        q,
                    )
        for p in eq_set:
            a, a2 = p.conclusion.body.a, p.conclusion.body.b
            for q in self.generate(depth - 1, ctx.extend(x, a)):
                body = q.conclusion.body
                if isinstance(body, EqSet):
                    add("PI-EQ-F", EqSet(Pi(a, abstract(x, body.a), x), Pi(a2, abstract(x, body.b), x)), p, q)
