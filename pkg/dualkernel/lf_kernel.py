"""Proof-theoretic kernel: bidirectional checking of β-normal proof terms.

Terms are split into ``Normal`` (introductions, aborts and embedded neutrals)
and ``Neutral`` (a variable or constant head under eliminations). An
application or projection can only take a neutral head, so no β-redex can be
written down. Substitution is hereditary: whenever replacing a variable would
put an introduction form under an elimination, the redex is contracted at
once, recursing at a strictly smaller type. Nothing here takes a fuel
argument.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from dualkernel.errors import (
    CheckResult,
    IntroAgainstWrongType,
    LfError,
    NotAFunction,
    NotAPair,
    NotErasable,
    SignatureError,
    TypeHeadMismatch,
    TypeMismatch,
    UnboundVariable,
    UndeclaredAtom,
)
from dualkernel.syntax import BULLET, UNIT, VOID, Ap, Expr, Pi, Var, fresh_name, lam

logger = logging.getLogger(__name__)


class _Printable:
    __slots__ = ()

    def __str__(self):
        from dualkernel.printer import print_lf_term, print_lf_type

        return print_lf_type(self) if isinstance(self, LfType) else print_lf_term(self)


# Types


class LfType(_Printable):
    __slots__ = ()


@dataclass(frozen=True)
class Atom(LfType):
    """``Prf(P)`` for an atomic proposition ``P``."""

    name: str


@dataclass(frozen=True)
class LTop(LfType):
    pass


@dataclass(frozen=True)
class LBot(LfType):
    pass


@dataclass(frozen=True)
class Fn(LfType):
    dom: LfType
    cod: LfType


@dataclass(frozen=True)
class Prod(LfType):
    left: LfType
    right: LfType


TOP = LTop()
BOT = LBot()


# Terms


class Normal(_Printable):
    __slots__ = ()


class Neutral(_Printable):
    __slots__ = ()


@dataclass(frozen=True)
class NBullet(Normal):
    pass


@dataclass(frozen=True)
class NLam(Normal):
    binder: str
    body: Normal


@dataclass(frozen=True)
class NPair(Normal):
    left: Normal
    right: Normal


@dataclass(frozen=True)
class NAbort(Normal):
    target: LfType
    scrutinee: Neutral


@dataclass(frozen=True)
class NNeutral(Normal):
    neutral: Neutral


@dataclass(frozen=True)
class NVar(Neutral):
    name: str


@dataclass(frozen=True)
class NConst(Neutral):
    name: str


@dataclass(frozen=True)
class NApp(Neutral):
    fun: Neutral
    arg: Normal


@dataclass(frozen=True)
class NFst(Neutral):
    pair: Neutral


@dataclass(frozen=True)
class NSnd(Neutral):
    pair: Neutral


LfTerm = Union[Normal, Neutral]


def var(name):
    """The normal form of a variable occurrence."""
    return NNeutral(NVar(name))


# Signatures and contexts


@dataclass(frozen=True)
class AtomDecl:
    name: str


@dataclass(frozen=True)
class ConstDecl:
    name: str
    type: LfType


@dataclass(frozen=True)
class Signature:
    declarations: Tuple[Union[AtomDecl, ConstDecl], ...] = ()

    def names(self):
        return [decl.name for decl in self.declarations]

    def has_atom(self, name):
        return any(isinstance(d, AtomDecl) and d.name == name for d in self.declarations)

    def constant_type(self, name) -> Optional[LfType]:
        for decl in self.declarations:
            if isinstance(decl, ConstDecl) and decl.name == name:
                return decl.type
        return None

    def declare_atom(self, name):
        self._require_new(name)
        return Signature(self.declarations + (AtomDecl(name),))

    def declare_constant(self, name, ty):
        self._require_new(name)
        result = check_type(self, ty)
        if not result:
            raise SignatureError(f"type of constant {name} is ill-formed: {result.diagnostic}")
        return Signature(self.declarations + (ConstDecl(name, ty),))

    def _require_new(self, name):
        if name in self.names():
            raise SignatureError(f"{name} is already declared")


EMPTY_SIGNATURE = Signature()


@dataclass(frozen=True)
class LfContext:
    entries: Tuple[Tuple[str, LfType], ...] = ()

    @classmethod
    def of(cls, *entries):
        return cls(tuple(entries))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def names(self):
        return [name for name, _ in self.entries]

    def lookup(self, name) -> Optional[LfType]:
        for entry_name, ty in self.entries:
            if entry_name == name:
                return ty
        return None

    def extend(self, name, ty):
        if name in self.names():
            raise SignatureError(f"{name} is already declared in the context")
        return LfContext(self.entries + ((name, ty),))


EMPTY_LF_CONTEXT = LfContext()


# Types and contexts are well-formed


def _check_type(sig, ty):
    if isinstance(ty, Atom):
        if not sig.has_atom(ty.name):
            raise UndeclaredAtom(f"atom {ty.name} is not declared")
    elif isinstance(ty, (Fn, Prod)):
        for part in (ty.dom, ty.cod) if isinstance(ty, Fn) else (ty.left, ty.right):
            _check_type(sig, part)


def check_type(sig, ty):
    try:
        _check_type(sig, ty)
    except LfError as error:
        return CheckResult.failed(error)
    return CheckResult.passed()


def check_context(sig, ctx):
    try:
        seen = set()
        for name, ty in ctx:
            if name in seen:
                raise SignatureError(f"{name} is declared twice in the context")
            seen.add(name)
            _check_type(sig, ty)
    except LfError as error:
        return CheckResult.failed(error)
    return CheckResult.passed()


def lf_type_eq(a, b):
    return a == b


# Bidirectional checking


def infer(sig, ctx, r) -> LfType:
    """Synthesize the type of neutral ``r``; raises ``LfError`` when it has none."""
    if isinstance(r, NVar):
        ty = ctx.lookup(r.name)
        if ty is None:
            raise UnboundVariable(f"variable {r.name} is not in the context")
        return ty
    if isinstance(r, NConst):
        ty = sig.constant_type(r.name)
        if ty is None:
            raise UnboundVariable(f"constant {r.name} is not in the signature")
        return ty
    if isinstance(r, NApp):
        head = infer(sig, ctx, r.fun)
        if not isinstance(head, Fn):
            raise NotAFunction(f"{r.fun} has type {head}, which is not a function type")
        _check(sig, ctx, r.arg, head.dom)
        return head.cod
    if isinstance(r, (NFst, NSnd)):
        head = infer(sig, ctx, r.pair)
        if not isinstance(head, Prod):
            raise NotAPair(f"{r.pair} has type {head}, which is not a product type")
        return head.left if isinstance(r, NFst) else head.right
    raise TypeError(f"not a neutral term: {r!r}")


def _check(sig, ctx, n, ty):
    if isinstance(n, NBullet):
        if not isinstance(ty, LTop):
            raise IntroAgainstWrongType(f"tt checked against {ty}")
    elif isinstance(n, NLam):
        if not isinstance(ty, Fn):
            raise IntroAgainstWrongType(f"{n} checked against {ty}")
        binder, body = n.binder, n.body
        if binder in ctx.names():
            # contexts keep names unique; rename the binder away from them
            fresh = fresh_name(binder, set(ctx.names()) | free_vars_normal(body))
            body = rename(body, binder, fresh)
            binder = fresh
        _check(sig, ctx.extend(binder, ty.dom), body, ty.cod)
    elif isinstance(n, NPair):
        if not isinstance(ty, Prod):
            raise IntroAgainstWrongType(f"{n} checked against {ty}")
        _check(sig, ctx, n.left, ty.left)
        _check(sig, ctx, n.right, ty.right)
    elif isinstance(n, NAbort):
        _check_type(sig, n.target)
        if n.target != ty:
            raise TypeMismatch(ty, n.target, f"abort annotated with {n.target} but checked against {ty}")
        scrutinee = infer(sig, ctx, n.scrutinee)
        if not isinstance(scrutinee, LBot):
            raise TypeMismatch(BOT, scrutinee, f"abort needs a proof of Bot, {n.scrutinee} has type {scrutinee}")
    elif isinstance(n, NNeutral):
        inferred = infer(sig, ctx, n.neutral)
        if not lf_type_eq(inferred, ty):
            raise TypeMismatch(ty, inferred)
    else:
        raise TypeError(f"not a normal term: {n!r}")


def check(sig, ctx, n, ty):
    """``n ⇐ ty`` in ``ctx``; the result carries the first failure."""
    try:
        _check_type(sig, ty)
        _check(sig, ctx, n, ty)
    except LfError as error:
        logger.debug("check failed: %s", error)
        return CheckResult.failed(error)
    return CheckResult.passed()


# Names


def free_vars_normal(n):
    if isinstance(n, NLam):
        return free_vars_normal(n.body) - {n.binder}
    if isinstance(n, NPair):
        return free_vars_normal(n.left) | free_vars_normal(n.right)
    if isinstance(n, NAbort):
        return free_vars_neutral(n.scrutinee)
    if isinstance(n, NNeutral):
        return free_vars_neutral(n.neutral)
    return set()


def free_vars_neutral(r):
    if isinstance(r, NVar):
        return {r.name}
    if isinstance(r, NApp):
        return free_vars_neutral(r.fun) | free_vars_normal(r.arg)
    if isinstance(r, (NFst, NSnd)):
        return free_vars_neutral(r.pair)
    return set()


def rename(n, old, new):
    """Replace free ``old`` by the variable ``new`` (assumed not to be captured)."""
    return hsubst(var(new), old, None, n)


def lf_eq(m, n):
    """Equality of normal forms up to renaming of bound variables."""
    return _alpha_normal(m, n, {}, {})


def _alpha_normal(m, n, left, right):
    if type(m) is not type(n):
        return False
    if isinstance(m, NBullet):
        return True
    if isinstance(m, NLam):
        depth = len(left)
        return _alpha_normal(m.body, n.body, {**left, m.binder: depth}, {**right, n.binder: depth})
    if isinstance(m, NPair):
        return _alpha_normal(m.left, n.left, left, right) and _alpha_normal(m.right, n.right, left, right)
    if isinstance(m, NAbort):
        return m.target == n.target and _alpha_neutral(m.scrutinee, n.scrutinee, left, right)
    return _alpha_neutral(m.neutral, n.neutral, left, right)


def _alpha_neutral(r, s, left, right):
    if type(r) is not type(s):
        return False
    if isinstance(r, NVar):
        if r.name in left or s.name in right:
            return left.get(r.name) == right.get(s.name)
        return r.name == s.name
    if isinstance(r, NConst):
        return r.name == s.name
    if isinstance(r, NApp):
        return _alpha_neutral(r.fun, s.fun, left, right) and _alpha_normal(r.arg, s.arg, left, right)
    return _alpha_neutral(r.pair, s.pair, left, right)


# Hereditary substitution


def hsubst(n, x, ty, m):
    """``[n/x]^ty m`` with every redex the substitution creates contracted.

    ``ty`` is the type of ``n`` and drives the recursion; it may be ``None``
    when ``n`` is a variable, since then no redex can arise.
    """
    return _Substitution(n, x, ty).normal(m)


class _Substitution:
    def __init__(self, n, x, ty):
        self.n = n
        self.x = x
        self.ty = ty
        self.avoid = free_vars_normal(n)

    def normal(self, m) -> Normal:
        if isinstance(m, NBullet):
            return m
        if isinstance(m, NLam):
            if m.binder == self.x:
                return m
            binder, body = m.binder, m.body
            if binder in self.avoid:
                fresh = fresh_name(binder, self.avoid | free_vars_normal(body) | {self.x})
                body = rename(body, binder, fresh)
                binder = fresh
            return NLam(binder, self.normal(body))
        if isinstance(m, NPair):
            return NPair(self.normal(m.left), self.normal(m.right))
        if isinstance(m, NAbort):
            result = self.neutral(m.scrutinee)
            if isinstance(result, Neutral):
                return NAbort(m.target, result)
            return _abort_at(m.target, result[0])
        result = self.neutral(m.neutral)
        return NNeutral(result) if isinstance(result, Neutral) else result[0]

    def neutral(self, r) -> Union[Neutral, Tuple[Normal, Optional[LfType]]]:
        """Substitute into ``r``; a tuple means the head was ``x`` and became normal."""
        if isinstance(r, NVar):
            if r.name != self.x:
                return r
            return _as_neutral(self.n, self.ty)
        if isinstance(r, NConst):
            return r
        if isinstance(r, NApp):
            arg = self.normal(r.arg)
            head = self.neutral(r.fun)
            if isinstance(head, Neutral):
                return NApp(head, arg)
            fun, fun_ty = head
            if not isinstance(fun_ty, Fn):
                raise TypeHeadMismatch(f"{fun} is applied but its type {fun_ty} is not a function type")
            if isinstance(fun, NLam):
                return _as_neutral(hsubst(arg, fun.binder, fun_ty.dom, fun.body), fun_ty.cod)
            if isinstance(fun, NAbort):
                return NAbort(fun_ty.cod, fun.scrutinee), fun_ty.cod
            raise TypeHeadMismatch(f"{fun} cannot be applied")
        head = self.neutral(r.pair)
        if isinstance(head, Neutral):
            return NFst(head) if isinstance(r, NFst) else NSnd(head)
        pair, pair_ty = head
        if not isinstance(pair_ty, Prod):
            raise TypeHeadMismatch(f"{pair} is projected but its type {pair_ty} is not a product type")
        component_ty = pair_ty.left if isinstance(r, NFst) else pair_ty.right
        if isinstance(pair, NPair):
            return _as_neutral(pair.left if isinstance(r, NFst) else pair.right, component_ty)
        if isinstance(pair, NAbort):
            return NAbort(component_ty, pair.scrutinee), component_ty
        raise TypeHeadMismatch(f"{pair} cannot be projected")


def _as_neutral(n, ty):
    """A normal that is really a neutral collapses back into one."""
    if isinstance(n, NNeutral):
        return n.neutral
    return n, ty


def _abort_at(target, proof):
    # a normal of type Bot is an embedded neutral or itself an abort
    if isinstance(proof, NAbort):
        return NAbort(target, proof.scrutinee)
    raise TypeHeadMismatch(f"{proof} is not a proof of Bot")


# Erasure


def erase(m) -> Expr:
    """Map a product-, abort- and constant-free proof term to a computational term."""
    if isinstance(m, NBullet):
        return BULLET
    if isinstance(m, NLam):
        return lam(m.binder, erase(m.body))
    if isinstance(m, NNeutral):
        return erase(m.neutral)
    if isinstance(m, NVar):
        return Var(m.name)
    if isinstance(m, NApp):
        return Ap(erase(m.fun), erase(m.arg))
    raise NotErasable(f"{m} has no computational counterpart")


def erase_type(ty) -> Expr:
    """``tr``: Top to ⊤, Bot to ⊥, function types to non-dependent Π."""
    if isinstance(ty, LTop):
        return UNIT
    if isinstance(ty, LBot):
        return VOID
    if isinstance(ty, Fn):
        return Pi(erase_type(ty.dom), erase_type(ty.cod), "_")
    raise NotErasable(f"{ty} has no computational counterpart")


def lf_size(m):
    if isinstance(m, NLam):
        return 1 + lf_size(m.body)
    if isinstance(m, NPair):
        return 1 + lf_size(m.left) + lf_size(m.right)
    if isinstance(m, NAbort):
        return 1 + lf_size(m.scrutinee)
    if isinstance(m, NNeutral):
        return lf_size(m.neutral)
    if isinstance(m, NApp):
        return 1 + lf_size(m.fun) + lf_size(m.arg)
    if isinstance(m, (NFst, NSnd)):
        return 1 + lf_size(m.pair)
    return 1
