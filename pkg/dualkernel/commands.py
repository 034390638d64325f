"""Text-in, Report-out drivers shared by the command line and the HTTP service.

Every driver parses its inputs, runs one kernel and folds the outcome into a
``Report``. Parse failures become usage reports (exit code 3); any other
``KernelError`` becomes a rejecting diagnostic.
"""

import logging
from functools import wraps

from dualkernel import lf_kernel as lf
from dualkernel.config import Settings
from dualkernel.ctt_oracle import No, Oracle, Unknown
from dualkernel.ctt_rules import check_derivation
from dualkernel.errors import ConfigurationError, KernelError, LfError, OracleError, RuleError, SyntaxIssue
from dualkernel.evaluation import OutOfFuel, Stuck, evaluate
from dualkernel.parser import (
    parse_derivation_file,
    parse_expr,
    parse_lf_context,
    parse_lf_term,
    parse_lf_type,
    parse_sequent,
    parse_signature,
)
from dualkernel.printer import print_expr, print_lf_type, print_sequent
from dualkernel.report import EXIT_ACCEPT, EXIT_REJECT, EXIT_UNKNOWN, EXIT_USAGE, Diagnostic, Report, span_of_text

logger = logging.getLogger(__name__)


def _reporting(func):
    """Turn escaping kernel errors into reports located in the main input."""

    @wraps(func)
    def wrapper(text, *args, file="<input>", **kwargs):
        try:
            return func(text, *args, file=file, **kwargs)
        except (SyntaxIssue, ConfigurationError) as error:
            logger.info("%s: usage error: %s", file, error.message)
            return Report.usage(error.message, error.span or span_of_text(text, file))
        except OracleError as error:
            return Report.unknown(str(error), span_of_text(text, file), {"error": error.code})
        except KernelError as error:
            logger.info("%s: rejected: %s", file, error)
            return Report.reject(str(error), error.span or span_of_text(text, file), {"error": error.code})
        except RecursionError:
            logger.warning("%s: input nests too deeply to process", file)
            return Report.unknown("input nests too deeply to process", span_of_text(text, file), {"error": "too-deep"})

    return wrapper


def _settings(settings):
    return settings if settings is not None else Settings.from_env()


@_reporting
def run_eval(text, settings=None, file="<input>"):
    """Evaluate a closed term to canonical form."""
    settings = _settings(settings)
    expr = parse_expr(text, file)
    outcome = evaluate(expr, settings.fuel)
    span = span_of_text(text, file)
    if isinstance(outcome, OutOfFuel):
        return Report.unknown(
            f"FUEL: no canonical form within {settings.fuel} steps", span, {"result": "fuel", "steps": outcome.steps}
        )
    if isinstance(outcome, Stuck):
        return Report.reject(
            f"STUCK at {outcome.at}", span, {"result": "stuck", "at": print_expr(outcome.at), "steps": outcome.steps}
        )
    return Report.accept({"result": "value", "value": print_expr(outcome.canonical), "steps": outcome.steps})


@_reporting
def run_check(text, file="<input>"):
    """Validate a derivation file against the rule catalog."""
    parsed = parse_derivation_file(text, file)
    evidence = parsed.evidence or None
    result = check_derivation(parsed.derivation, evidence)
    data = {"rule": parsed.derivation.rule, "conclusion": print_sequent(parsed.derivation.conclusion)}
    if result:
        logger.info("%s: derivation of %s accepted", file, data["conclusion"])
        return Report.accept(data)
    error = result.error
    span = _node_span(parsed, error) or span_of_text(text, file)
    data.update(error=error.code, path=[str(step) for step in getattr(error, "path", ())])
    return Report.reject(str(error), span, data)


def _node_span(parsed, error):
    if not isinstance(error, RuleError):
        return None
    path = list(error.path)
    if path[:1] == ["evidence"]:
        node = parsed.evidence.get(path[1])
        path = path[2:]
    else:
        node = parsed.derivation
    for index in path:
        if node is None or not isinstance(index, int) or index >= len(node.children):
            return None
        node = node.children[index]
    return None if node is None else node.span


def _verdict_report(verdict, span, data):
    if isinstance(verdict, No):
        return Report.reject(verdict.witness, span, {**data, "reason": verdict.reason})
    if isinstance(verdict, Unknown):
        message = f"{verdict.reason}: {verdict.detail}" if verdict.detail else verdict.reason
        return Report.unknown(message, span, {**data, "reason": verdict.reason})
    return Report.accept(data)


@_reporting
def run_sem(text, settings=None, file="<input>"):
    """Decide a functional sequent by the meaning explanations."""
    settings = _settings(settings)
    judgement = parse_sequent(text, file)
    verdict = Oracle(settings.fuel, settings.max_classes).sequent(judgement)
    logger.info("%s: %s", file, type(verdict).__name__)
    return _verdict_report(verdict, span_of_text(text, file), {"sequent": print_sequent(judgement)})


def _lf_inputs(sig_text, ctx_text):
    sig = parse_signature(sig_text or "", "<signature>")
    ctx = parse_lf_context(ctx_text or "", "<context>")
    wellformed = lf.check_context(sig, ctx)
    if not wellformed:
        raise wellformed.error
    return sig, ctx


@_reporting
def run_lf_check(text, type_text, sig_text=None, ctx_text=None, file="<input>"):
    """Check a normal proof term against a type."""
    sig, ctx = _lf_inputs(sig_text, ctx_text)
    ty = parse_lf_type(type_text, "<type>")
    term = parse_lf_term(text, sig, ctx, file)
    result = lf.check(sig, ctx, term, ty)
    if not result:
        raise result.error
    return Report.accept({"type": print_lf_type(ty)})


@_reporting
def run_lf_infer(text, sig_text=None, ctx_text=None, file="<input>"):
    """Synthesize the type of a neutral proof term."""
    sig, ctx = _lf_inputs(sig_text, ctx_text)
    term = parse_lf_term(text, sig, ctx, file)
    if not isinstance(term, lf.NNeutral):
        raise LfError(f"{term} is an introduction form; its type can only be checked")
    return Report.accept({"type": print_lf_type(lf.infer(sig, ctx, term.neutral))})


@_reporting
def run_lf_erase(text, file="<input>"):
    """Erase a proof term to a computational term."""
    term = parse_lf_term(text, file=file)
    return Report.accept({"expr": print_expr(lf.erase(term))})


@_reporting
def run_bridge(text, type_text, sig_text=None, settings=None, file="<input>"):
    """Check a closed proof term, erase it and ask the oracle about the erasure."""
    settings = _settings(settings)
    sig, ctx = _lf_inputs(sig_text, None)
    ty = parse_lf_type(type_text, "<type>")
    term = parse_lf_term(text, sig, ctx, file)
    result = lf.check(sig, ctx, term, ty)
    if not result:
        raise result.error
    expr, expr_type = lf.erase(term), lf.erase_type(ty)
    verdict = Oracle(settings.fuel, settings.max_classes).ver(expr, expr_type)
    data = {"expr": print_expr(expr), "type": print_expr(expr_type)}
    return _verdict_report(verdict, span_of_text(text, file), data)


# usage error, then reject, then unknown, as No beats Unknown in a conjunction
SEVERITY = {EXIT_ACCEPT: 0, EXIT_UNKNOWN: 1, EXIT_REJECT: 2, EXIT_USAGE: 3}


def combine(named_reports):
    """Fold per-file reports into one; the most severe report decides the verdict."""
    named_reports = list(named_reports)
    if not named_reports:
        return Report.usage("no input files")
    worst = max((report for _, report in named_reports), key=lambda report: SEVERITY[report.exit_code])
    diagnostics = tuple(
        Diagnostic(f"{name}: {d.message}", d.span) for name, report in named_reports for d in report.diagnostics
    )
    files = {name: report.to_dict() for name, report in named_reports}
    accepted = sum(1 for _, report in named_reports if report.exit_code == EXIT_ACCEPT)
    return Report(
        worst.verdict,
        diagnostics,
        {"files": files, "accepted": accepted, "total": len(named_reports)},
        usage_error=worst.usage_error,
    )
