"""Direct execution of the meaning explanations on the finitary fragment.

Types built from ⊤, ⊥ and non-dependent Π have at most one equivalence class
of verifications, so quantifying over all closed verifications can mostly be
replaced by quantifying over one representative per class. That stops being
enough once an argument is itself an inhabited function type: its members are
all equal, yet a body may apply one to a non-member and see them differ. There
membership is proved by evaluating the body with the argument left as a
variable, and refuted by trying a few members that use their own arguments.
Every answer is a three-valued ``Verdict``: evaluation is fueled, and anything
neither proved nor refuted is reported as ``Unknown`` instead of guessed.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple, Union

from dualkernel.config import DEFAULT_FUEL, DEFAULT_MAX_CLASSES
from dualkernel.ctt_rules import EqSet, EqVer, IsSet, SequentJudgement, Ver, body_payloads
from dualkernel.errors import FreeVariableError, NonFinitaryContext, RepresentativeExplosion, ScopeError
from dualkernel.evaluation import Blocked, OutOfFuel, Stuck, evaluate, evaluate_open
from dualkernel.syntax import (
    BULLET,
    UNIT,
    Ap,
    Bullet,
    Expr,
    Lam,
    Pi,
    Unit,
    Var,
    Void,
    free_vars,
    fresh_name,
    lam,
    open_scope,
    open_with_fresh,
    subst_env,
    uses_bound,
)

logger = logging.getLogger(__name__)


# Verdicts

FUEL = "fuel"
NON_FINITARY = "non-finitary"
HIGHER_ORDER = "higher-order"
NOT_MEMBERS = "not-members"
NOT_A_TYPE = "not-a-type"
COUNTEREXAMPLE = "counterexample"


@dataclass(frozen=True)
class Yes:
    def __bool__(self):
        return True


@dataclass(frozen=True)
class No:
    witness: str
    reason: str = COUNTEREXAMPLE

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Unknown:
    reason: str
    detail: str = ""

    def __bool__(self):
        return False


Verdict = Union[Yes, No, Unknown]
YES = Yes()


def conjoin(verdicts: Iterable[Verdict]) -> Verdict:
    """Yes iff all are Yes; the first No wins over any Unknown."""
    undetermined = None
    for verdict in verdicts:
        if isinstance(verdict, No):
            return verdict
        if isinstance(verdict, Unknown) and undetermined is None:
            undetermined = verdict
    return undetermined if undetermined is not None else YES


# Finitary types


@dataclass(frozen=True)
class FUnit:
    source: Expr = field(default=Unit(), compare=False)

    def class_count(self):
        return 1


@dataclass(frozen=True)
class FVoid:
    source: Expr = field(default=Void(), compare=False)

    def class_count(self):
        return 0


@dataclass(frozen=True)
class FArrow:
    dom: "FinitaryType"
    cod: "FinitaryType"
    source: Optional[Expr] = field(default=None, compare=False)

    def class_count(self):
        return self.cod.class_count() ** self.dom.class_count()


FinitaryType = Union[FUnit, FVoid, FArrow]


def classify_finitary(a, fuel=DEFAULT_FUEL) -> Union[FinitaryType, No, Unknown]:
    """Evaluate ``a`` and read off its finitary descriptor.

    Returns ``No`` when ``a`` is not a type at all (its value is not a type
    former, or evaluation gets stuck).
    """
    return _classify(a, fuel, evaluate)


def _classify(a, fuel, run):
    outcome = run(a, fuel)
    if isinstance(outcome, OutOfFuel):
        return Unknown(FUEL, f"{a} did not reach a canonical form")
    if isinstance(outcome, Blocked):
        return Unknown(NON_FINITARY, f"{a} depends on the hypothesis {outcome.head}")
    if isinstance(outcome, Stuck):
        return No(f"{a} is stuck at {outcome.at}", NOT_A_TYPE)
    value = outcome.canonical
    if isinstance(value, Unit):
        return FUnit(a)
    if isinstance(value, Void):
        return FVoid(a)
    if isinstance(value, Pi):
        if uses_bound(value.scope):
            return Unknown(NON_FINITARY, f"{value} is a dependent function type")
        dom = _classify(value.dom, fuel, run)
        if not _is_finitary(dom):
            return dom
        # the codomain does not mention the binder, so it is already closed
        cod = _classify(value.scope, fuel, run)
        if not _is_finitary(cod):
            return cod
        return FArrow(dom, cod, a)
    return No(f"{a} evaluates to {value}, which is not a type", NOT_A_TYPE)


def _is_finitary(f):
    return isinstance(f, (FUnit, FVoid, FArrow))


def _domains(f):
    domains = []
    while isinstance(f, FArrow):
        domains.append(f.dom)
        f = f.cod
    return domains


def _higher_order(f):
    """Whether some argument of ``f`` ranges over an inhabited function type."""
    while isinstance(f, FArrow):
        if f.dom.class_count() == 0:
            return False
        if isinstance(f.dom, FArrow):
            return True
        f = f.cod
    return False


def representatives(f, max_classes=DEFAULT_MAX_CLASSES) -> List[Expr]:
    """One closed canonical verification per equivalence class of ``f``.

    Over ⊤ and ⊥ class counts stay in {0, 1}: an arrow out of an empty
    domain has the single vacuous class and an arrow out of a one-class
    domain has as many classes as its codomain. Constant functions and the
    identity therefore cover every class.
    """
    count = f.class_count()
    if count > max_classes:
        raise RepresentativeExplosion(f"{count} classes exceed the bound of {max_classes}")
    if isinstance(f, FUnit):
        return [BULLET]
    if isinstance(f, FVoid):
        return []
    if f.dom.class_count() == 0:
        return [lam("x", Var("x"))]
    return [lam("_", r) for r in representatives(f.cod, max_classes)]


def _lams(names, body):
    for name in reversed(names):
        body = lam(name, body)
    return body


def _source(f):
    if f.source is not None:
        return f.source
    if isinstance(f, FUnit):
        return Unit()
    if isinstance(f, FVoid):
        return Void()
    return Pi(_source(f.dom), _source(f.cod), "_")


# Categorical judgements


class Oracle:
    """Semantic judgements under one fuel and class bound."""

    def __init__(self, fuel=DEFAULT_FUEL, max_classes=DEFAULT_MAX_CLASSES):
        self.fuel = fuel
        self.max_classes = max_classes

    def classify(self, a):
        _require_closed(a)
        return classify_finitary(a, self.fuel)

    def representatives(self, f):
        return representatives(f, self.max_classes)

    def witnesses(self, f) -> List[Expr]:
        """Representatives of ``f`` followed by members that use their arguments.

        A projection applies one argument to representatives of its own
        domains until it reaches ⊤. When some argument type is empty, a
        function answering ``Unit`` once that argument is supplied is a
        member vacuously.
        """
        found = self.representatives(f)
        if not isinstance(f, FArrow) or f.class_count() == 0:
            return found
        domains = _domains(f)
        names = [f"y{i}" for i in range(len(domains))]
        empty = next((i for i, d in enumerate(domains) if d.class_count() == 0), None)
        if empty is not None:
            extra = [_lams(names[: empty + 1], UNIT)]
        else:
            extra = []
            for name, dom in zip(names, domains):
                inner = _domains(dom)
                if any(d.class_count() == 0 for d in inner):
                    continue
                body = Var(name)
                for d in inner:
                    body = Ap(body, self.representatives(d)[0])
                extra.append(_lams(names, body))
        return found + [p for p in extra if p not in found]

    def is_set(self, a) -> Verdict:
        f = self.classify(a)
        return f if not _is_finitary(f) else YES

    def ver(self, m, a) -> Verdict:
        _require_closed(m)
        f = self.classify(a)
        if not _is_finitary(f):
            return f
        return self._ver(m, f)

    def _ver(self, m, f) -> Verdict:
        if not _higher_order(f):
            return self._sampled_ver(m, f, self.representatives)
        established = self._established(m, f, {})
        if isinstance(established, Yes):
            return YES
        sampled = self._sampled_ver(m, f, self.witnesses)
        if isinstance(sampled, No):
            return sampled
        return _undecided(established, sampled, f"{m} in {_source(f)}")

    def _sampled_ver(self, m, f, samples) -> Verdict:
        """Membership checked at every argument ``samples`` offers.

        With representatives over a first-order type this decides membership;
        otherwise only its No answers are conclusive.
        """
        if isinstance(f, FVoid):
            return No(f"{_source(f)} has no canonical verifications")
        outcome = evaluate(m, self.fuel)
        if isinstance(outcome, OutOfFuel):
            return Unknown(FUEL, f"{m} did not reach a canonical form")
        if isinstance(outcome, Stuck):
            return No(f"{m} is stuck at {outcome.at}")
        value = outcome.canonical
        if isinstance(f, FUnit):
            return YES if isinstance(value, Bullet) else No(f"{m} evaluates to {value}, not tt")
        if not isinstance(value, Lam):
            return No(f"{m} evaluates to {value}, not a lambda")
        args = samples(f.dom)
        members = conjoin(
            _annotate(self._sampled_ver(open_scope(value.scope, r), f.cod, samples), f"at argument {r}")
            for r in args
        )
        if not isinstance(members, Yes):
            return members
        return conjoin(self._functional_at(value, f, args))

    def _functional_at(self, value, f, args):
        for r0, r1 in itertools.product(args, repeat=2):
            related = self._eq_members(r0, r1, f.dom)
            if isinstance(related, Yes):
                yield self._eq_members(open_scope(value.scope, r0), open_scope(value.scope, r1), f.cod)
            elif isinstance(related, Unknown):
                yield related

    def _established(self, m, f, hyps: Dict[str, FinitaryType]) -> Verdict:
        """Prove ``m`` verifies ``f`` whichever members the variables of ``hyps`` stand for.

        ``hyps`` maps the free variables of ``m`` to inhabited finitary types.
        Yes holds for every instantiation; any other answer only means the
        proof did not go through.
        """
        if isinstance(f, FVoid):
            return No(f"{_source(f)} has no canonical verifications")
        outcome = evaluate_open(m, self.fuel)
        if isinstance(outcome, OutOfFuel):
            return Unknown(FUEL, f"{m} did not reach a canonical form")
        if isinstance(outcome, Stuck):
            return No(f"{m} is stuck at {outcome.at}")
        if isinstance(outcome, Blocked):
            return self._established_spine(outcome, f, hyps)
        value = outcome.canonical
        if isinstance(f, FUnit):
            return YES if isinstance(value, Bullet) else No(f"{m} evaluates to {value}, not tt")
        if not isinstance(value, Lam):
            return No(f"{m} evaluates to {value}, not a lambda")
        if f.dom.class_count() == 0:
            return YES
        name, body = open_with_fresh(value, hyps)
        return self._established(body, f.cod, {**hyps, name: f.dom})

    def _established_spine(self, blocked, f, hyps) -> Verdict:
        # the value is that of the hypothesis applied to the whole spine
        if blocked.head not in hyps:
            raise FreeVariableError({blocked.head})
        ty = hyps[blocked.head]
        for arg in blocked.args:
            if not isinstance(ty, FArrow):
                return No(f"{blocked.head} takes fewer than {len(blocked.args)} arguments")
            verdict = self._established(arg, ty.dom, hyps)
            if not isinstance(verdict, Yes):
                return _annotate(verdict, f"argument {arg} of {blocked.head}")
            ty = ty.cod
        if ty.class_count() == f.class_count() and _same_extension(ty, f):
            return YES
        return No(f"{blocked.head} applied to {len(blocked.args)} arguments lands in {_source(ty)}, not {_source(f)}")

    def eq_ver(self, m, n, a) -> Verdict:
        _require_closed(m, n)
        f = self.classify(a)
        if not _is_finitary(f):
            return f
        return self._eq_ver(m, n, f)

    def _eq_ver(self, m, n, f) -> Verdict:
        for term in (m, n):
            member = self._ver(term, f)
            if isinstance(member, No):
                return No(f"{term} is not a member of {_source(f)}: {member.witness}", NOT_MEMBERS)
            if isinstance(member, Unknown):
                return member
        return self._eq_members(m, n, f)

    def _eq_members(self, m, n, f) -> Verdict:
        """Equality of two terms already known to verify ``f``."""
        if isinstance(f, (FUnit, FVoid)):
            return YES
        vm = evaluate(m, self.fuel)
        vn = evaluate(n, self.fuel)
        if isinstance(vm, OutOfFuel) or isinstance(vn, OutOfFuel):
            return Unknown(FUEL, f"{m} or {n} did not reach a canonical form")
        return conjoin(
            _annotate(
                self._eq_members(open_scope(vm.canonical.scope, r), open_scope(vn.canonical.scope, r), f.cod),
                f"at argument {r}",
            )
            for r in self.representatives(f.dom)
        )

    def eq_type(self, a, b) -> Verdict:
        fa = self.classify(a)
        if not _is_finitary(fa):
            return fa
        fb = self.classify(b)
        if not _is_finitary(fb):
            return fb
        return self._eq_type(fa, fb)

    def _eq_type(self, fa, fb) -> Verdict:
        left, right = _source(fa), _source(fb)
        reps_a, reps_b = self.representatives(fa), self.representatives(fb)
        cross = conjoin(
            itertools.chain(
                (_annotate(self._ver(r, fb), f"{r} from {left}") for r in reps_a),
                (_annotate(self._ver(r, fa), f"{r} from {right}") for r in reps_b),
            )
        )
        if not isinstance(cross, Yes):
            return cross
        if fa.class_count() != fb.class_count():
            return No(f"{left} has {fa.class_count()} classes, {right} has {fb.class_count()}")
        # representatives cannot see everything: λx.Ω verifies an arrow iff
        # its domain is empty, which no representative of the other side exercises
        return YES if _same_extension(fa, fb) else No(f"{left} and {right} have different verifications")

    # Environments

    def envs(self, ctx) -> List[Tuple[Expr, ...]]:
        """All environments for ``ctx`` built from representatives, in order."""
        environments, _ = self._environments(ctx, self.representatives)
        logger.debug("%d environments for a context of length %d", len(environments), len(ctx))
        return environments

    def _environments(self, ctx, samples):
        """Environments drawn from ``samples`` and whether any entry is an inhabited function type."""
        partial: List[Tuple[Expr, ...]] = [()]
        functions = False
        for position, (name, ty) in enumerate(ctx):
            prefix = ctx.prefix(position)
            extended = []
            for env in partial:
                f = self.classify(subst_env(ty, env, prefix))
                if not _is_finitary(f):
                    raise NonFinitaryContext(f"type of {name} is not finitary under {_show_env(env, prefix)}")
                functions = functions or (isinstance(f, FArrow) and f.class_count() > 0)
                extended.extend(env + (r,) for r in samples(f))
            partial = extended
        return partial, functions

    def check_env(self, env, ctx) -> Verdict:
        """``ρ : Γ`` for an arbitrary supplied environment."""
        if len(env) != len(ctx):
            return No(f"environment has {len(env)} terms, context has {len(ctx)} entries")
        return conjoin(
            _annotate(
                self.ver(subst_env(term, env[:i], ctx.prefix(i)), subst_env(ty, env[:i], ctx.prefix(i))),
                f"entry {name}",
            )
            for i, ((name, ty), term) in enumerate(zip(ctx, env))
        )

    def eq_env(self, env0, env1, ctx) -> Verdict:
        """``ρ0 = ρ1 : Γ``, presupposing both are environments for ``ctx``."""
        if len(env0) != len(ctx) or len(env1) != len(ctx):
            return No("environment lengths differ from the context")
        return conjoin(
            _annotate(
                self.eq_ver(
                    subst_env(m0, env0[:i], ctx.prefix(i)),
                    subst_env(m1, env1[:i], ctx.prefix(i)),
                    subst_env(ty, env0[:i], ctx.prefix(i)),
                ),
                f"entry {name}",
            )
            for i, ((name, ty), m0, m1) in enumerate(zip(ctx, env0, env1))
        )

    # Sequents

    def sequent(self, judgement: SequentJudgement) -> Verdict:
        ctx, body = judgement.context, judgement.body
        _require_scoped(judgement)
        try:
            environments, functions = self._environments(ctx, self.representatives)
            if functions:
                environments, _ = self._environments(ctx, self.witnesses)
        except NonFinitaryContext as error:
            return Unknown(NON_FINITARY, error.message)
        sampled = self._sampled_sequent(body, ctx, environments)
        if not functions or isinstance(sampled, No):
            return sampled
        established = self._established_sequent(body, ctx)
        if isinstance(established, Yes):
            return YES
        return _undecided(established, sampled, str(judgement))

    def _sampled_sequent(self, body, ctx, environments) -> Verdict:
        def instance(env):
            return tuple(subst_env(p, env, ctx) for p in body_payloads(body))

        unary = conjoin(
            _annotate(self._categorical(body, instance(env)), f"environment {_show_env(env, ctx)}")
            for env in environments
        )
        if not isinstance(unary, Yes):
            return unary

        def functional():
            for env0, env1 in itertools.product(environments, repeat=2):
                related = self.eq_env(env0, env1, ctx)
                if isinstance(related, Yes):
                    yield _annotate(
                        self._functional(body, instance(env0), instance(env1)),
                        f"environments {_show_env(env0, ctx)} and {_show_env(env1, ctx)}",
                    )
                elif isinstance(related, Unknown):
                    yield related

        return conjoin(functional())

    def _established_sequent(self, body, ctx) -> Verdict:
        """Prove the sequent for every environment at once.

        Entries of type ⊤ behave like ``tt`` whatever member they hold, so
        they are replaced by it; function entries stay variables.
        """
        hyps: Dict[str, FinitaryType] = {}
        env: List[Expr] = []
        for position, (name, ty) in enumerate(ctx):
            f = _classify(subst_env(ty, tuple(env), ctx.prefix(position)), self.fuel, evaluate_open)
            if not _is_finitary(f):
                return f
            if f.class_count() == 0:
                return YES
            if isinstance(f, FArrow):
                variable = fresh_name(name, set(hyps))
                hyps[variable] = f
                env.append(Var(variable))
            else:
                env.append(BULLET)
        payloads = tuple(subst_env(p, tuple(env), ctx) for p in body_payloads(body))
        kinds = [_classify(p, self.fuel, evaluate_open) for p in payloads[-2 if isinstance(body, EqSet) else -1:]]
        for f in kinds:
            if not _is_finitary(f):
                return f
        if isinstance(body, IsSet):
            return YES
        if isinstance(body, EqSet):
            return self._eq_type(*kinds)
        return conjoin(self._established(m, kinds[0], hyps) for m in payloads[:-1])

    def _categorical(self, body, payloads) -> Verdict:
        if isinstance(body, IsSet):
            return self.is_set(*payloads)
        if isinstance(body, EqSet):
            return self.eq_type(*payloads)
        if isinstance(body, Ver):
            return self.ver(*payloads)
        return self.eq_ver(*payloads)

    def _functional(self, body, first, second) -> Verdict:
        if isinstance(body, IsSet):
            return self.eq_type(first[0], second[0])
        if isinstance(body, EqSet):
            return self.eq_type(first[0], second[1])
        if isinstance(body, Ver):
            return self.eq_ver(first[0], second[0], first[1])
        return self.eq_ver(first[0], second[1], first[2])


def _undecided(established, sampled, what) -> Unknown:
    """The answer when every sample passes but no proof was found."""
    for verdict in (sampled, established):
        if isinstance(verdict, Unknown) and verdict.reason != HIGHER_ORDER:
            return verdict
    if isinstance(established, Unknown):
        return established
    return Unknown(HIGHER_ORDER, f"{what} holds at every sampled argument, but {established.witness}")


def _same_extension(fa, fb):
    """Whether two finitary types with equal class counts have the same verifications."""
    if fa.class_count() == 0:
        return True
    if isinstance(fa, FUnit) or isinstance(fb, FUnit):
        return isinstance(fa, FUnit) and isinstance(fb, FUnit)
    vacuous_a = fa.dom.class_count() == 0
    vacuous_b = fb.dom.class_count() == 0
    if vacuous_a or vacuous_b:
        return vacuous_a and vacuous_b
    return _same_extension(fa.dom, fb.dom) and _same_extension(fa.cod, fb.cod)


def _annotate(verdict, context):
    if isinstance(verdict, No):
        return No(f"{context}: {verdict.witness}", verdict.reason)
    return verdict


def _show_env(env, ctx):
    if not env:
        return "."
    return ", ".join(f"{name} := {term}" for (name, _), term in zip(ctx, env))


def _require_closed(*terms):
    names = set()
    for term in terms:
        names |= free_vars(term)
    if names:
        raise FreeVariableError(names)


def _require_scoped(judgement):
    declared = set()
    for name, ty in judgement.context:
        unbound = free_vars(ty) - declared
        if unbound:
            raise ScopeError(f"type of {name} mentions undeclared {', '.join(sorted(unbound))}")
        declared.add(name)
    for payload in body_payloads(judgement.body):
        unbound = free_vars(payload) - declared
        if unbound:
            raise ScopeError(f"{', '.join(sorted(unbound))} not declared in the context")


# Module-level operations with the default budget


def sem_ver(m, a, fuel=DEFAULT_FUEL, max_classes=DEFAULT_MAX_CLASSES):
    return Oracle(fuel, max_classes).ver(m, a)


def sem_eq_ver(m, n, a, fuel=DEFAULT_FUEL, max_classes=DEFAULT_MAX_CLASSES):
    return Oracle(fuel, max_classes).eq_ver(m, n, a)


def sem_eq_type(a, b, fuel=DEFAULT_FUEL, max_classes=DEFAULT_MAX_CLASSES):
    return Oracle(fuel, max_classes).eq_type(a, b)


def sem_is_set(a, fuel=DEFAULT_FUEL, max_classes=DEFAULT_MAX_CLASSES):
    return Oracle(fuel, max_classes).is_set(a)


def envs(ctx, fuel=DEFAULT_FUEL, max_classes=DEFAULT_MAX_CLASSES):
    return Oracle(fuel, max_classes).envs(ctx)


def check_env(env, ctx, fuel=DEFAULT_FUEL, max_classes=DEFAULT_MAX_CLASSES):
    return Oracle(fuel, max_classes).check_env(env, ctx)


def eq_env(env0, env1, ctx, fuel=DEFAULT_FUEL, max_classes=DEFAULT_MAX_CLASSES):
    return Oracle(fuel, max_classes).eq_env(env0, env1, ctx)


def sem_sequent(judgement, fuel=DEFAULT_FUEL, max_classes=DEFAULT_MAX_CLASSES):
    return Oracle(fuel, max_classes).sequent(judgement)
