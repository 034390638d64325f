"""Terms of the computational theory.

Binders are locally nameless: a bound occurrence is a ``Bound`` index counting
enclosing binders, free occurrences are ``Var`` names, and each binder keeps
its surface name only as a printing hint (excluded from equality). Alpha
equivalence is therefore plain ``==``.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Sequence, Tuple

from dualkernel.errors import LengthMismatch

logger = logging.getLogger(__name__)


class Expr:
    """Base class of all terms."""

    __slots__ = ()

    def __str__(self):
        from dualkernel.printer import print_expr

        return print_expr(self)


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Bound(Expr):
    index: int


@dataclass(frozen=True)
class Unit(Expr):
    pass


@dataclass(frozen=True)
class Void(Expr):
    pass


@dataclass(frozen=True)
class Bullet(Expr):
    pass


@dataclass(frozen=True)
class Pi(Expr):
    dom: Expr
    scope: Expr
    binder: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Lam(Expr):
    scope: Expr
    binder: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Ap(Expr):
    fun: Expr
    arg: Expr


UNIT = Unit()
VOID = Void()
BULLET = Bullet()


def pi(dom, binder, cod):
    """Build ``Pi(dom, binder, cod)`` from a codomain written with ``Var(binder)``."""
    return Pi(dom, abstract(binder, cod), binder)


def lam(binder, body):
    """Build ``Lam(binder, body)`` from a body written with ``Var(binder)``."""
    return Lam(abstract(binder, body), binder)


def arrow(dom, cod):
    """Non-dependent function type."""
    return Pi(dom, cod, "_")


# Binding plumbing
#
# Traversals keep an explicit stack: substituted terms nest deeper than the
# recursion limit.

_LOOSE = "_loose"


def _children(e):
    """Subterms of ``e`` paired with the number of binders entered to reach them."""
    if isinstance(e, Pi):
        return ((e.dom, 0), (e.scope, 1))
    if isinstance(e, Lam):
        return ((e.scope, 1),)
    if isinstance(e, Ap):
        return ((e.fun, 0), (e.arg, 0))
    return ()


def loose_bound(e):
    """How many enclosing binders ``e`` refers to: one more than its largest dangling index.

    The answer is cached on each node, so subterms shared between terms are
    measured once.
    """
    stack = [(e, False)]
    while stack:
        node, expanded = stack.pop()
        if getattr(node, _LOOSE, None) is not None:
            continue
        children = _children(node)
        if isinstance(node, Bound):
            loose = node.index + 1
        elif not children:
            loose = 0
        elif not expanded:
            stack.append((node, True))
            stack.extend((child, False) for child, _ in children)
            continue
        else:
            loose = max(max(getattr(child, _LOOSE) - shift, 0) for child, shift in children)
        object.__setattr__(node, _LOOSE, loose)
    return getattr(e, _LOOSE)


def _rebuild(e, depth, leaf, untouched):
    """Rebuild ``e`` bottom-up.

    ``leaf(node, depth)`` replaces ``Var`` and ``Bound`` nodes; subterms with
    ``untouched(node, depth)`` are reused as they are, and so is any node whose
    children all came back unchanged.
    """
    done = []
    stack = [(e, depth, False)]
    while stack:
        node, d, expanded = stack.pop()
        if expanded:
            children = _children(node)
            rebuilt = done[len(done) - len(children):]
            del done[len(done) - len(children):]
            if all(new is old for new, (old, _) in zip(rebuilt, children)):
                done.append(node)
            elif isinstance(node, Pi):
                done.append(Pi(rebuilt[0], rebuilt[1], node.binder))
            elif isinstance(node, Lam):
                done.append(Lam(rebuilt[0], node.binder))
            else:
                done.append(Ap(rebuilt[0], rebuilt[1]))
        elif untouched(node, d):
            done.append(node)
        elif isinstance(node, (Pi, Lam, Ap)):
            stack.append((node, d, True))
            for child, shift in reversed(_children(node)):
                stack.append((child, d + shift, False))
        else:
            done.append(leaf(node, d))
    return done.pop()


def abstract(name, e, depth=0):
    """Turn free ``Var(name)`` occurrences into the index of a new binder."""
    return _rebuild(
        e,
        depth,
        lambda node, d: Bound(d) if isinstance(node, Var) and node.name == name else node,
        lambda node, d: False,
    )


def open_scope(scope, value, depth=0):
    """Instantiate the innermost binder of ``scope`` with ``value``."""
    return _rebuild(
        scope,
        depth,
        lambda node, d: value if isinstance(node, Bound) and node.index == d else node,
        lambda node, d: loose_bound(node) <= d,
    )


def uses_bound(scope, depth=0):
    """True iff the innermost binder of ``scope`` occurs in it."""
    stack = [(scope, depth)]
    while stack:
        node, d = stack.pop()
        if isinstance(node, Bound):
            if node.index == d:
                return True
        elif loose_bound(node) > d:
            stack.extend((child, d + shift) for child, shift in _children(node))
    return False


def fresh_name(hint, avoid):
    """First of ``hint``, ``hint'``, ``hint''``, ... not in ``avoid``."""
    name = hint
    while name in avoid:
        name += "'"
    return name


def open_with_fresh(binder_expr, avoid=()):
    """Open a ``Pi`` codomain or ``Lam`` body at a fresh variable.

    Returns ``(name, opened)`` with ``name`` clashing neither with ``avoid``
    nor with any free variable of the scope.
    """
    scope = binder_expr.scope
    name = fresh_name(binder_expr.binder, set(avoid) | free_vars(scope))
    return name, open_scope(scope, Var(name))


# Operations


def free_vars(e):
    """Names occurring free in ``e``."""
    names = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            names.add(node.name)
        elif isinstance(node, Pi):
            stack.extend((node.dom, node.scope))
        elif isinstance(node, Lam):
            stack.append(node.scope)
        elif isinstance(node, Ap):
            stack.extend((node.fun, node.arg))
    return names


def alpha_eq(a, b):
    return a == b


def subst(body, x, arg):
    """Capture-avoiding ``[arg/x]body``."""
    return _subst_many(body, {x: arg})


def _subst_many(e, mapping):
    if not mapping:
        return e
    return _rebuild(
        e,
        0,
        lambda node, d: mapping.get(node.name, node) if isinstance(node, Var) else node,
        lambda node, d: False,
    )


@dataclass(frozen=True)
class Context:
    """Ordered hypotheses ``x1:A1, ..., xn:An``."""

    entries: Tuple[Tuple[str, Expr], ...] = ()

    @classmethod
    def of(cls, *entries):
        return cls(tuple((name, ty) for name, ty in entries))

    def __len__(self):
        return len(self.entries)

    def __iter__(self) -> Iterator[Tuple[str, Expr]]:
        return iter(self.entries)

    def names(self):
        return [name for name, _ in self.entries]

    def lookup(self, name) -> Optional[Expr]:
        for entry_name, ty in reversed(self.entries):
            if entry_name == name:
                return ty
        return None

    def extend(self, name, ty):
        return Context(self.entries + ((name, ty),))

    def insert(self, position, name, ty):
        return Context(self.entries[:position] + ((name, ty),) + self.entries[position:])

    def prefix(self, length):
        return Context(self.entries[:length])

    def __str__(self):
        from dualkernel.printer import print_context

        return print_context(self)


EMPTY_CONTEXT = Context()

Environment = Tuple[Expr, ...]


def subst_env(e, env: Sequence[Expr], ctx: Context):
    """``[ρ/Γ]e``: replace Γ's variables by the matching terms of ρ at once."""
    if len(env) != len(ctx):
        raise LengthMismatch(f"environment has {len(env)} terms but context has {len(ctx)} entries")
    mapping: Dict[str, Expr] = {}
    for (name, _), term in zip(ctx, env):
        # earlier entries land in later payloads first
        mapping[name] = _subst_many(term, dict(mapping))
    return _subst_many(e, mapping)


def size(e):
    """Number of AST nodes."""
    count = 0
    stack = [e]
    while stack:
        node = stack.pop()
        count += 1
        stack.extend(child for child, _ in _children(node))
    return count
