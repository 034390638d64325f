"""Source locations and the machine-readable report every command produces.

JSON schema (``Report.to_json``)::

    {
      "verdict": "accept" | "reject" | "unknown",
      "diagnostics": [
        {"message": str,
         "span": {"file": str, "line": int, "column_start": int, "column_end": int} | null}
      ],
      "data": {...}            # command specific, JSON-serializable
    }

Keys are sorted and separators fixed, so identical input yields identical bytes.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

ACCEPT = "accept"
REJECT = "reject"
UNKNOWN = "unknown"

VERDICTS = (ACCEPT, REJECT, UNKNOWN)

EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column_start: int
    column_end: int

    def __post_init__(self):
        if self.column_end < self.column_start:
            raise ValueError(f"span ends before it starts: {self}")

    def to_dict(self):
        return {
            "file": self.file,
            "line": self.line,
            "column_start": self.column_start,
            "column_end": self.column_end,
        }

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column_start}-{self.column_end}"


def span_of_text(text, file="<input>"):
    """Span covering the first line of ``text``."""
    first = text.split("\n", 1)[0]
    return SourceSpan(file, 1, 1, max(1, len(first)))


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: Optional[SourceSpan] = None

    def to_dict(self):
        return {"message": self.message, "span": None if self.span is None else self.span.to_dict()}

    def __str__(self):
        return self.message if self.span is None else f"{self.span}: {self.message}"


@dataclass(frozen=True)
class Report:
    verdict: str
    diagnostics: Tuple[Diagnostic, ...] = ()
    data: Dict[str, Any] = field(default_factory=dict)
    usage_error: bool = False

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == REJECT and not self.diagnostics:
            raise ValueError("a rejecting report needs at least one diagnostic")

    @classmethod
    def accept(cls, data=None, diagnostics=()):
        return cls(ACCEPT, tuple(diagnostics), dict(data or {}))

    @classmethod
    def reject(cls, message, span=None, data=None):
        return cls(REJECT, (Diagnostic(message, span),), dict(data or {}))

    @classmethod
    def unknown(cls, message, span=None, data=None):
        return cls(UNKNOWN, (Diagnostic(message, span),), dict(data or {}))

    @classmethod
    def usage(cls, message, span=None, data=None):
        """Parse or usage failure; exits with code 3."""
        return cls(REJECT, (Diagnostic(message, span),), dict(data or {}), usage_error=True)

    @property
    def exit_code(self):
        if self.usage_error:
            return EXIT_USAGE
        return {ACCEPT: EXIT_ACCEPT, REJECT: EXIT_REJECT, UNKNOWN: EXIT_UNKNOWN}[self.verdict]

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "data": self.data,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
