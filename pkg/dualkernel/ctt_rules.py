"""Derivation trees for the functional sequent judgement and their validation.

A rule scheme is written with first-order patterns. Expression metavariables
(``Meta``) bind at their first occurrence and are compared with ``==`` (alpha
equivalence) afterwards. Binder bodies are bound as scopes by ``PPi`` and
``PLam``; ``Inst`` denotes a scope instantiated at a term or at the variable a
premise adds to the context, as in ``[N/x]B`` or ``Γ, x:A ≫ E ∈ B``.
Instantiations are checked after the whole node has been matched, so a scope
may be bound by a later premise than the one that uses it.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

from dualkernel.errors import (
    ArityMismatch,
    CheckResult,
    DuplicateName,
    MissingTypehoodEvidence,
    PatternMismatch,
    RuleError,
    ScopeViolation,
    UnknownRule,
)
from dualkernel.syntax import (
    BULLET,
    UNIT,
    VOID,
    Ap,
    Context,
    Expr,
    Lam,
    Pi,
    Var,
    abstract,
    free_vars,
    open_scope,
    open_with_fresh,
)

logger = logging.getLogger(__name__)


# Judgements


@dataclass(frozen=True)
class IsSet:
    a: Expr


@dataclass(frozen=True)
class EqSet:
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Ver:
    m: Expr
    a: Expr


@dataclass(frozen=True)
class EqVer:
    m: Expr
    n: Expr
    a: Expr


Body = Union[IsSet, EqSet, Ver, EqVer]


def body_payloads(body):
    if isinstance(body, IsSet):
        return (body.a,)
    if isinstance(body, EqSet):
        return (body.a, body.b)
    if isinstance(body, Ver):
        return (body.m, body.a)
    return (body.m, body.n, body.a)


@dataclass(frozen=True)
class SequentJudgement:
    context: Context
    body: Body

    def __str__(self):
        from dualkernel.printer import print_sequent

        return print_sequent(self)


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: SequentJudgement
    children: Tuple["Derivation", ...] = ()
    span: Optional[object] = field(default=None, compare=False)


# Patterns


@dataclass(frozen=True)
class Meta:
    name: str


@dataclass(frozen=True)
class NameRef:
    """The variable introduced by a premise's context extension."""

    name: str


@dataclass(frozen=True)
class Inst:
    scope: str
    arg: Union[Meta, NameRef]


@dataclass(frozen=True)
class PPi:
    dom: object
    scope: str


@dataclass(frozen=True)
class PLam:
    scope: str


@dataclass(frozen=True)
class PAp:
    fun: object
    arg: object


@dataclass(frozen=True)
class AnyJudgement:
    pass


@dataclass(frozen=True)
class SequentPattern:
    body: object
    extension: Optional[Tuple[str, object]] = None


SideCondition = Callable[[Mapping[str, Expr], Context], Optional[str]]


@dataclass(frozen=True)
class RuleScheme:
    name: str
    premises: Tuple[SequentPattern, ...]
    conclusion: SequentPattern
    side_condition: Optional[SideCondition] = field(default=None, compare=False)
    note: str = ""

    def established_types(self):
        """Type patterns that a premise in the conclusion's context shows to be types."""
        return {
            body_payloads(premise.body)[0]
            for premise in self.premises
            if premise.extension is None and isinstance(premise.body, (IsSet, EqSet))
        }


def _hypothesis_declared(exprs, ctx):
    x = exprs["x"]
    if not isinstance(x, Var):
        return f"{x} is not a variable"
    declared = ctx.lookup(x.name)
    if declared is None:
        return f"{x.name} is not declared in the context"
    if declared != exprs["A"]:
        return f"{x.name} is declared at {declared}, not at {exprs['A']}"
    return None


def _seq(body, extension=None):
    return SequentPattern(body, extension)


A, B, C = Meta("A"), Meta("B"), Meta("C")
A2 = Meta("A'")
M, N, M2, N2, P = Meta("M"), Meta("N"), Meta("M'"), Meta("N'"), Meta("P")


def _catalog():
    x, z = NameRef("x"), NameRef("z")
    return (
        RuleScheme("UNIT-F", (), _seq(IsSet(UNIT))),
        RuleScheme("UNIT-EQ-F", (), _seq(EqSet(UNIT, UNIT))),
        RuleScheme("UNIT-I", (), _seq(Ver(BULLET, UNIT))),
        RuleScheme("UNIT-EQ-I", (), _seq(EqVer(BULLET, BULLET, UNIT))),
        RuleScheme("VOID-F", (), _seq(IsSet(VOID))),
        RuleScheme("VOID-EQ-F", (), _seq(EqSet(VOID, VOID))),
        RuleScheme("VOID-E", (_seq(Ver(M, VOID)),), _seq(AnyJudgement())),
        RuleScheme(
            "PI-F",
            (_seq(IsSet(A)), _seq(IsSet(Inst("B", x)), ("x", A))),
            _seq(IsSet(PPi(A, "B"))),
        ),
        RuleScheme(
            "PI-EQ-F",
            (_seq(EqSet(A, A2)), _seq(EqSet(Inst("B", z), Inst("B'", z)), ("z", A))),
            _seq(EqSet(PPi(A, "B"), PPi(A2, "B'"))),
        ),
        RuleScheme(
            "PI-I",
            (_seq(Ver(Inst("E", x), Inst("B", x)), ("x", A)),),
            _seq(Ver(PLam("E"), PPi(A, "B"))),
        ),
        RuleScheme(
            "PI-EQ-I",
            (_seq(EqVer(Inst("E", z), Inst("E'", z), Inst("B", z)), ("z", A)),),
            _seq(EqVer(PLam("E"), PLam("E'"), PPi(A, "B"))),
        ),
        RuleScheme(
            "PI-E",
            (_seq(Ver(M, PPi(A, "B"))), _seq(Ver(N, A))),
            _seq(Ver(PAp(M, N), Inst("B", N))),
        ),
        RuleScheme(
            "PI-EQ-E",
            # the arguments are compared at the domain A
            (_seq(EqVer(M, M2, PPi(A, "B"))), _seq(EqVer(N, N2, A))),
            _seq(EqVer(PAp(M, N), PAp(M2, N2), Inst("B", N))),
        ),
        RuleScheme(
            "PI-BETA",
            (_seq(Ver(Inst("E", x), Inst("B", x)), ("x", A)), _seq(Ver(N, A))),
            _seq(EqVer(PAp(PLam("E"), N), Inst("E", N), Inst("B", N))),
            note="computation rule for application",
        ),
        RuleScheme("HYP", (), _seq(Ver(Meta("x"), A)), side_condition=_hypothesis_declared),
        RuleScheme("SYM", (_seq(EqVer(N, M, A)),), _seq(EqVer(M, N, A))),
        RuleScheme("TRANS", (_seq(EqVer(M, N, A)), _seq(EqVer(N, P, A))), _seq(EqVer(M, P, A))),
        RuleScheme("REFL", (_seq(Ver(M, A)),), _seq(EqVer(M, M, A))),
        RuleScheme("CONV", (_seq(Ver(M, A)), _seq(EqSet(A, B))), _seq(Ver(M, B))),
        RuleScheme("EQ-CONV", (_seq(EqVer(M, N, A)), _seq(EqSet(A, B))), _seq(EqVer(M, N, B))),
        RuleScheme("SET-REFL", (_seq(IsSet(A)),), _seq(EqSet(A, A))),
        RuleScheme("SET-SYM", (_seq(EqSet(B, A)),), _seq(EqSet(A, B))),
        RuleScheme("SET-TRANS", (_seq(EqSet(A, B)), _seq(EqSet(B, C))), _seq(EqSet(A, C))),
    )


_CATALOG = _catalog()
_BY_NAME = {scheme.name: scheme for scheme in _CATALOG}


def rule_catalog():
    return list(_CATALOG)


def lookup_rule(name):
    return _BY_NAME.get(name)


# Matching


class _Matcher:
    def __init__(self, path):
        self.path = path
        self.exprs: Dict[str, Expr] = {}
        self.scopes: Dict[str, Expr] = {}
        self.names: Dict[str, str] = {}
        self.deferred: List[Tuple[Inst, Expr, str]] = []

    def fail(self, message):
        raise PatternMismatch(message, self.path)

    def expr(self, pattern, actual, where):
        if isinstance(pattern, Meta):
            bound = self.exprs.get(pattern.name)
            if bound is None:
                self.exprs[pattern.name] = actual
            elif bound != actual:
                self.fail(f"{where}: {pattern.name} is {bound} but found {actual}")
        elif isinstance(pattern, Inst):
            self._inst(pattern, actual, where)
        elif isinstance(pattern, PPi):
            if not isinstance(actual, Pi):
                self.fail(f"{where}: expected a Pi type, found {actual}")
            self.expr(pattern.dom, actual.dom, where)
            self._scope(pattern.scope, actual.scope, where)
        elif isinstance(pattern, PLam):
            if not isinstance(actual, Lam):
                self.fail(f"{where}: expected a lambda, found {actual}")
            self._scope(pattern.scope, actual.scope, where)
        elif isinstance(pattern, PAp):
            if not isinstance(actual, Ap):
                self.fail(f"{where}: expected an application, found {actual}")
            self.expr(pattern.fun, actual.fun, where)
            self.expr(pattern.arg, actual.arg, where)
        elif pattern != actual:
            self.fail(f"{where}: expected {pattern}, found {actual}")

    def _scope(self, name, actual, where):
        bound = self.scopes.get(name)
        if bound is None:
            self.scopes[name] = actual
        elif bound != actual:
            self.fail(f"{where}: binder body {name} differs between occurrences")

    def _inst(self, pattern, actual, where):
        if pattern.scope not in self.scopes and isinstance(pattern.arg, NameRef):
            # abstracting the premise's fresh variable determines the scope
            self.scopes[pattern.scope] = abstract(self.names[pattern.arg.name], actual)
            return
        self.deferred.append((pattern, actual, where))

    def body(self, pattern, actual, where):
        if isinstance(pattern, AnyJudgement):
            return
        if type(pattern) is not type(actual):
            self.fail(f"{where}: expected a {type(pattern).__name__} judgement, found {type(actual).__name__}")
        for pat, act in zip(body_payloads(pattern), body_payloads(actual)):
            self.expr(pat, act, where)

    def resolve(self):
        for pattern, actual, where in self.deferred:
            scope = self.scopes.get(pattern.scope)
            if scope is None:
                self.fail(f"{where}: nothing determines {pattern.scope}")
            if isinstance(pattern.arg, NameRef):
                arg = Var(self.names[pattern.arg.name])
            else:
                arg = self.exprs.get(pattern.arg.name)
                if arg is None:
                    self.fail(f"{where}: nothing determines {pattern.arg.name}")
            expected = open_scope(scope, arg)
            if expected != actual:
                self.fail(f"{where}: expected substitution instance {expected}, found {actual}")


def fresh(x, ctx):
    return x not in ctx.names()


def _check_context_scope(ctx, path):
    seen = set()
    for name, ty in ctx:
        if name in seen:
            raise DuplicateName(f"{name} is declared twice", path)
        unbound = free_vars(ty) - seen
        if unbound:
            raise ScopeViolation(
                f"type of {name} mentions undeclared {', '.join(sorted(unbound))}", path
            )
        seen.add(name)


def _check_sequent_scope(judgement, path):
    _check_context_scope(judgement.context, path)
    declared = set(judgement.context.names())
    for payload in body_payloads(judgement.body):
        unbound = free_vars(payload) - declared
        if unbound:
            raise ScopeViolation(f"{', '.join(sorted(unbound))} not declared in the context", path)


def _check_node(node, path):
    scheme = _BY_NAME.get(node.rule)
    if scheme is None:
        raise UnknownRule(f"no rule named {node.rule}", path)
    if len(node.children) != len(scheme.premises):
        raise ArityMismatch(
            f"{node.rule} takes {len(scheme.premises)} premises, got {len(node.children)}", path
        )
    _check_sequent_scope(node.conclusion, path)

    gamma = node.conclusion.context
    matcher = _Matcher(path)
    matcher.body(scheme.conclusion.body, node.conclusion.body, "conclusion")
    for index, (premise, child) in enumerate(zip(scheme.premises, node.children)):
        where = f"premise {index + 1}"
        child_ctx = child.conclusion.context
        if premise.extension is None:
            if child_ctx != gamma:
                matcher.fail(f"{where}: context must be the conclusion's context")
        else:
            name_meta, type_pattern = premise.extension
            if len(child_ctx) != len(gamma) + 1 or child_ctx.prefix(len(gamma)) != gamma:
                matcher.fail(f"{where}: context must extend the conclusion's by one hypothesis")
            new_name, new_type = child_ctx.entries[-1]
            if not fresh(new_name, gamma):
                raise DuplicateName(f"{where}: {new_name} is not fresh", path)
            matcher.names[name_meta] = new_name
            matcher.expr(type_pattern, new_type, where)
            if type_pattern not in scheme.established_types() and formation(gamma, new_type) is None:
                raise MissingTypehoodEvidence(
                    f"{where}: no derivation of {SequentJudgement(gamma, IsSet(new_type))}", path
                )
        matcher.body(premise.body, child.conclusion.body, where)
    matcher.resolve()

    if scheme.side_condition is not None:
        problem = scheme.side_condition(matcher.exprs, gamma)
        if problem:
            raise PatternMismatch(f"{node.rule}: {problem}", path)
    logger.debug("accepted %s at %s", node.rule, path or "root")


def _check_tree(d, path=()):
    stack = [(d, tuple(path))]
    while stack:
        node, where = stack.pop()
        _check_node(node, where)
        stack.extend((child, where + (i,)) for i, child in enumerate(node.children))


def check_ctx(ctx, evidence: Mapping[str, Derivation] = None):
    """Validate ``ctx`` using ``evidence[x]``, a derivation of ``Δ ≫ A set`` per entry."""
    evidence = evidence or {}
    try:
        for position, (name, ty) in enumerate(ctx):
            delta = ctx.prefix(position)
            if not fresh(name, delta):
                raise DuplicateName(f"{name} is declared twice")
            witness = evidence.get(name)
            expected = SequentJudgement(delta, IsSet(ty))
            if witness is None:
                raise MissingTypehoodEvidence(f"no derivation of {expected}")
            if witness.conclusion != expected:
                raise MissingTypehoodEvidence(
                    f"evidence for {name} concludes {witness.conclusion}, expected {expected}"
                )
            _check_tree(witness, ("evidence", name))
    except RuleError as error:
        return CheckResult.failed(error)
    return CheckResult.passed()


def check_derivation(d, evidence: Mapping[str, Derivation] = None):
    """Accept iff the root context passes ``check_ctx`` and every node instantiates its named scheme.

    Every hypothesis of the root context needs its typehood derivation in
    ``evidence``. A hypothesis a premise adds is a type either by a sibling
    premise (``A set`` or ``A = A' set``) or by the formation rules alone.
    """
    try:
        _check_context_scope(d.conclusion.context, ())
    except RuleError as error:
        return CheckResult.failed(error)
    ctx_result = check_ctx(d.conclusion.context, evidence)
    if not ctx_result:
        logger.debug("rejected root context: %s", ctx_result.error)
        return ctx_result
    try:
        _check_tree(d)
    except RuleError as error:
        logger.debug("rejected derivation: %s", error)
        return CheckResult.failed(error)
    return CheckResult.passed()


def formation(ctx, a):
    """The derivation of ``ctx ≫ a set`` by formation rules alone, or None.

    Types written with ⊤, ⊥ and Π alone have one; a variable or a redex
    anywhere in ``a`` leaves it to explicit evidence.
    """
    conclusion = SequentJudgement(ctx, IsSet(a))
    if a == UNIT:
        return Derivation("UNIT-F", conclusion)
    if a == VOID:
        return Derivation("VOID-F", conclusion)
    if not isinstance(a, Pi):
        return None
    dom = formation(ctx, a.dom)
    if dom is None:
        return None
    name, cod_type = open_with_fresh(a, ctx.names())
    cod = formation(ctx.extend(name, a.dom), cod_type)
    if cod is None:
        return None
    return Derivation("PI-F", conclusion, (dom, cod))


def weaken(d, name, ty, position=None):
    """Insert hypothesis ``name:ty`` into every context of ``d``.

    The hypothesis goes right after the root context, so premises that
    extend the context keep their extensions after it.
    """
    if position is None:
        position = len(d.conclusion.context)

    def go(node):
        ctx = node.conclusion.context
        if name in ctx.names():
            raise DuplicateName(f"{name} is not fresh for the derivation")
        conclusion = SequentJudgement(ctx.insert(position, name, ty), node.conclusion.body)
        return Derivation(node.rule, conclusion, tuple(go(child) for child in node.children), node.span)

    return go(d)
