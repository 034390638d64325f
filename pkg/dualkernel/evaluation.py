"""Big-step call-by-name evaluation of closed terms to canonical form."""

import logging
from dataclasses import dataclass
from typing import List, Tuple, Union

from dualkernel.errors import ConfigurationError, FreeVariableError, ScopeError
from dualkernel.syntax import Ap, Bullet, Expr, Lam, Pi, Unit, Var, Void, free_vars, open_scope

logger = logging.getLogger(__name__)

CANONICAL_FORMS = (Unit, Void, Bullet, Pi, Lam)


@dataclass(frozen=True)
class Value:
    canonical: Expr
    steps: int = 0


@dataclass(frozen=True)
class Stuck:
    """Evaluation reached ``at``, an application whose head is a non-lambda value."""

    at: Expr
    steps: int = 0


@dataclass(frozen=True)
class OutOfFuel:
    steps: int = 0


@dataclass(frozen=True)
class Blocked:
    """Evaluation of an open term reached the free variable ``head`` applied to ``args``.

    Only ``evaluate_open`` produces this outcome.
    """

    head: str
    args: Tuple[Expr, ...]
    steps: int = 0


EvalOutcome = Union[Value, Stuck, OutOfFuel]


def is_canonical(e):
    return isinstance(e, CANONICAL_FORMS)


def _check_fuel(fuel):
    if not isinstance(fuel, int) or fuel < 1:
        raise ConfigurationError(f"fuel must be a positive integer, got {fuel!r}")


def evaluate(e, fuel):
    """Evaluate closed ``e`` spending at most ``fuel`` β-contractions.

    The left spine of applications is kept on an explicit stack of pending
    arguments, so ``ap(M, N)`` evaluates ``M`` first and then continues with
    ``[N/x]E`` exactly as the non-canonical rule for application prescribes;
    arguments are never evaluated before substitution.
    """
    _check_fuel(fuel)
    names = free_vars(e)
    if names:
        raise FreeVariableError(names)
    return _run(e, fuel)


def evaluate_open(e, fuel):
    """Evaluate ``e`` whose free variables stand for unknown closed terms.

    Steps that never put a free variable in head position are the same for
    every instantiation, so the outcome is either one of ``evaluate``'s or
    ``Blocked`` at the first variable that reaches the head.
    """
    _check_fuel(fuel)
    return _run(e, fuel)


def _run(e, fuel):
    pending: List[Expr] = []
    steps = 0
    term = e
    while True:
        if isinstance(term, Ap):
            pending.append(term.arg)
            term = term.fun
            continue
        if isinstance(term, Var):
            return Blocked(term.name, tuple(reversed(pending)), steps)
        if not is_canonical(term):
            raise ScopeError(f"malformed term: dangling index {term!r}")
        if not pending:
            return Value(term, steps)
        if not isinstance(term, Lam):
            return Stuck(Ap(term, pending[-1]), steps)
        if steps == fuel:
            logger.debug("evaluation ran out of fuel after %d steps", steps)
            return OutOfFuel(steps)
        steps += 1
        term = open_scope(term.scope, pending.pop())
