"""Exception hierarchy shared by both kernels and the frontend."""

from dataclasses import dataclass
from typing import Optional


class KernelError(Exception):
    """Root of every error raised by dualkernel."""

    code = "kernel-error"

    def __init__(self, message, span=None):
        super().__init__(message)
        self.message = message
        self.span = span


class ConfigurationError(KernelError):
    code = "configuration"


class SyntaxIssue(KernelError):
    """Concrete syntax could not be parsed; ``span`` locates the problem."""

    code = "syntax"


class ScopeError(KernelError):
    code = "scope"


class FreeVariableError(ScopeError):
    code = "free-variable"

    def __init__(self, names):
        self.names = frozenset(names)
        super().__init__(f"term is not closed: free variables {', '.join(sorted(self.names))}")


class LengthMismatch(KernelError):
    code = "length-mismatch"


# ctt-rules


class RuleError(KernelError):
    """A derivation node failed validation; ``path`` is the child-index path."""

    code = "rule"

    def __init__(self, message, path=(), span=None):
        super().__init__(message, span)
        self.path = tuple(path)

    def __str__(self):
        where = "/".join(str(i) for i in self.path) or "root"
        return f"{self.code} at {where}: {self.message}"


class UnknownRule(RuleError):
    code = "unknown-rule"


class ArityMismatch(RuleError):
    code = "arity-mismatch"


class PatternMismatch(RuleError):
    code = "pattern-mismatch"


class ScopeViolation(RuleError):
    code = "scope-violation"


class DuplicateName(RuleError):
    code = "duplicate-name"


class MissingTypehoodEvidence(RuleError):
    code = "missing-typehood-evidence"


# ctt-oracle


class OracleError(KernelError):
    code = "oracle"


class RepresentativeExplosion(OracleError):
    code = "representative-explosion"


class NonFinitaryContext(OracleError):
    code = "non-finitary-context"


# lf-kernel


class LfError(KernelError):
    code = "lf"


class UndeclaredAtom(LfError):
    code = "undeclared-atom"


class UnboundVariable(LfError):
    code = "unbound-variable"


class NotAFunction(LfError):
    code = "not-a-function"


class NotAPair(LfError):
    code = "not-a-pair"


class TypeMismatch(LfError):
    code = "type-mismatch"

    def __init__(self, expected, inferred, message=None):
        self.expected = expected
        self.inferred = inferred
        super().__init__(message or f"expected {expected}, inferred {inferred}")


class IntroAgainstWrongType(LfError):
    code = "intro-against-wrong-type"


class TypeHeadMismatch(LfError):
    code = "type-head-mismatch"


class NotErasable(LfError):
    code = "not-erasable"


class SignatureError(LfError):
    code = "signature"


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a boolean check that explains its failures."""

    ok: bool
    error: Optional[KernelError] = None

    def __bool__(self):
        return self.ok

    @property
    def diagnostic(self):
        return None if self.error is None else str(self.error)

    @classmethod
    def passed(cls):
        return cls(True)

    @classmethod
    def failed(cls, error):
        return cls(False, error)
