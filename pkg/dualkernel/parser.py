"""Concrete syntax for terms, sequents, derivations and LF signatures/terms.

One LALR grammar serves every term-level language, so the keywords of all
of them are reserved everywhere. The LF term grammar only lets a neutral
term stand at the head of an application or projection: writing a redex is a
syntax error, not a type error.
"""

import logging
import re
from functools import lru_cache

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from dualkernel import lf_kernel as lf
from dualkernel.ctt_rules import Derivation, EqSet, EqVer, IsSet, SequentJudgement, Ver
from dualkernel.errors import KernelError, SyntaxIssue
from dualkernel.report import SourceSpan
from dualkernel.syntax import BULLET, UNIT, VOID, Ap, Context, Var, lam, pi

logger = logging.getLogger(__name__)

RESERVED = frozenset(
    {"Unit", "Void", "tt", "Pi", "in", "set", "Top", "Bot", "fst", "snd", "abort", "atom", "const"}
)

TERM_GRAMMAR = r"""
start_expr: expr
start_sequent: sequent
start_lftype: lftype
start_lfterm: normal
start_signature: decl*
start_lfctx: lfctx

// computational terms
?expr: "\\" IDENT "." expr                  -> lam
     | "Pi" "(" IDENT ":" expr ")" expr     -> pi
     | app
?app: app atom                              -> ap
    | atom
?atom: IDENT                                -> var
     | "Unit"                               -> unit
     | "Void"                               -> void
     | "tt"                                 -> bullet
     | "(" expr ")"

// sequents
sequent: ctx ">>" body
?ctx: "."                                   -> empty_ctx
    | ctx "," IDENT ":" expr                -> ctx_extend
?body: expr "set"                           -> is_set
     | expr "=" expr "set"                  -> eq_set
     | expr "in" expr                       -> ver
     | expr "=" expr "in" expr              -> eq_ver

// LF types
?lftype: "(" lftype ")" lftype              -> fn
       | prodtype
?prodtype: lfatom "*" prodtype              -> prod
         | lfatom
?lfatom: "Top"                              -> top
       | "Bot"                              -> bot
       | IDENT                              -> atom
       | "(" lftype ")"

// LF terms, stratified into normal and neutral
?normal: "[" IDENT "]" normal               -> nlam
       | "tt"                               -> nbullet
       | "<" normal "," normal ">"          -> npair
       | "abort" "{" lftype "}" "(" neutral ")" -> nabort
       | neutral                            -> nneutral
?neutral: neutral arg                       -> napp
        | "fst" nhead                       -> nfst
        | "snd" nhead                       -> nsnd
        | nhead
?nhead: IDENT                               -> nvar
      | "(" neutral ")"
?arg: IDENT                                 -> arg_var
    | "tt"                                  -> nbullet
    | "<" normal "," normal ">"             -> npair
    | "(" normal ")"

// signatures and LF contexts
?decl: "atom" IDENT ";"                     -> atom_decl
     | "const" IDENT ":" lftype ";"         -> const_decl
?lfctx: "."                                 -> lfctx_empty
      | lfbinding ("," lfbinding)*          -> lfctx_entries
lfbinding: IDENT ":" lftype

COMMENT: /--[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

# reserved words never lex as identifiers
TERM_GRAMMAR += (
    "IDENT: /(?!(?:" + "|".join(sorted(RESERVED)) + ")(?![A-Za-z0-9_']))[A-Za-z_][A-Za-z0-9_']*/\n"
)

DERIVATION_GRAMMAR = r"""
start: evidence* derivation
evidence: "(" "evidence" IDENT derivation ")"
derivation: "(" RULE STRING derivation* ")"

RULE: /[A-Z][A-Z0-9]*(-[A-Z0-9]+)*/
IDENT: /[a-z_][A-Za-z0-9_']*/
STRING: /"(?:[^"\\\n]|\\.)*"/
COMMENT: /--[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_STARTS = ["start_expr", "start_sequent", "start_lftype", "start_lfterm", "start_signature", "start_lfctx"]


@lru_cache(maxsize=None)
def _term_parser():
    return Lark(TERM_GRAMMAR, start=_STARTS, parser="lalr", lexer="contextual")


@lru_cache(maxsize=None)
def _derivation_parser():
    return Lark(DERIVATION_GRAMMAR, parser="lalr", lexer="contextual", propagate_positions=True)


class _TermBuilder(Transformer):
    # computational terms

    def start_expr(self, children):
        return children[0]

    start_sequent = start_lftype = start_lfterm = start_lfctx = start_expr

    @v_args(inline=True)
    def var(self, name):
        return Var(str(name))

    def unit(self, _):
        return UNIT

    def void(self, _):
        return VOID

    def bullet(self, _):
        return BULLET

    @v_args(inline=True)
    def lam(self, name, body):
        return lam(str(name), body)

    @v_args(inline=True)
    def pi(self, name, dom, cod):
        return pi(dom, str(name), cod)

    @v_args(inline=True)
    def ap(self, fun, arg):
        return Ap(fun, arg)

    # sequents

    @v_args(inline=True)
    def sequent(self, ctx, body):
        return SequentJudgement(ctx, body)

    def empty_ctx(self, _):
        return Context()

    @v_args(inline=True)
    def ctx_extend(self, ctx, name, ty):
        return ctx.extend(str(name), ty)

    @v_args(inline=True)
    def is_set(self, a):
        return IsSet(a)

    @v_args(inline=True)
    def eq_set(self, a, b):
        return EqSet(a, b)

    @v_args(inline=True)
    def ver(self, m, a):
        return Ver(m, a)

    @v_args(inline=True)
    def eq_ver(self, m, n, a):
        return EqVer(m, n, a)

    # LF types

    @v_args(inline=True)
    def fn(self, dom, cod):
        return lf.Fn(dom, cod)

    @v_args(inline=True)
    def prod(self, left, right):
        return lf.Prod(left, right)

    def top(self, _):
        return lf.TOP

    def bot(self, _):
        return lf.BOT

    @v_args(inline=True)
    def atom(self, name):
        return lf.Atom(str(name))

    # LF terms

    @v_args(inline=True)
    def nlam(self, name, body):
        return lf.NLam(str(name), body)

    def nbullet(self, _):
        return lf.NBullet()

    @v_args(inline=True)
    def npair(self, left, right):
        return lf.NPair(left, right)

    @v_args(inline=True)
    def nabort(self, target, scrutinee):
        return lf.NAbort(target, scrutinee)

    @v_args(inline=True)
    def nneutral(self, neutral):
        return lf.NNeutral(neutral)

    @v_args(inline=True)
    def napp(self, fun, arg):
        return lf.NApp(fun, arg)

    @v_args(inline=True)
    def nfst(self, pair):
        return lf.NFst(pair)

    @v_args(inline=True)
    def nsnd(self, pair):
        return lf.NSnd(pair)

    @v_args(inline=True)
    def nvar(self, name):
        return lf.NVar(str(name))

    @v_args(inline=True)
    def arg_var(self, name):
        return lf.var(str(name))

    # signatures and LF contexts

    def start_signature(self, decls):
        sig = lf.EMPTY_SIGNATURE
        for kind, name, ty in decls:
            sig = sig.declare_atom(name) if kind == "atom" else sig.declare_constant(name, ty)
        return sig

    @v_args(inline=True)
    def atom_decl(self, name):
        return "atom", str(name), None

    @v_args(inline=True)
    def const_decl(self, name, ty):
        return "const", str(name), ty

    def lfctx_empty(self, _):
        return lf.EMPTY_LF_CONTEXT

    def lfctx_entries(self, bindings):
        ctx = lf.EMPTY_LF_CONTEXT
        for name, ty in bindings:
            ctx = ctx.extend(name, ty)
        return ctx

    @v_args(inline=True)
    def lfbinding(self, name, ty):
        return str(name), ty


_BUILDER = _TermBuilder()


def _span_at(text, line, column, width=1, file="<input>"):
    """A span clamped into the bounds of ``text``."""
    lines = text.split("\n")
    line = min(max(line, 1), len(lines))
    length = max(1, len(lines[line - 1]))
    start = min(max(column, 1), length)
    end = min(start + max(width, 1) - 1, length)
    return SourceSpan(file, line, start, end)


def _syntax_issue(error, text, file):
    if isinstance(error, UnexpectedEOF) or getattr(error, "line", -1) < 1:
        lines = text.split("\n")
        span = _span_at(text, len(lines), len(lines[-1]), 1, file)
        return SyntaxIssue("unexpected end of input", span)
    if isinstance(error, UnexpectedToken):
        token = error.token
        width = len(str(token)) if str(token) else 1
        expected = ", ".join(sorted(error.expected)[:8])
        message = f"unexpected {token.type} {str(token)!r}" + (f", expected one of {expected}" if expected else "")
        if token.type == "$END":
            message = "unexpected end of input"
        return SyntaxIssue(message, _span_at(text, error.line, error.column, width, file))
    if isinstance(error, UnexpectedCharacters):
        char = text[error.pos_in_stream] if 0 <= error.pos_in_stream < len(text) else "?"
        return SyntaxIssue(f"unexpected character {char!r}", _span_at(text, error.line, error.column, 1, file))
    return SyntaxIssue(str(error), _span_at(text, error.line, error.column, 1, file))


def normalize_source(text):
    return text.replace("\r\n", "\n").replace("\r", "\n")


def _parse(text, start, file):
    text = normalize_source(text)
    try:
        tree = _term_parser().parse(text, start=start)
    except UnexpectedInput as error:
        raise _syntax_issue(error, text, file) from None
    try:
        return _BUILDER.transform(tree)
    except VisitError as error:
        if isinstance(error.orig_exc, KernelError):
            raise SyntaxIssue(error.orig_exc.message, _span_at(text, 1, 1, len(text.split("\n")[0]), file)) from None
        raise


def parse_expr(text, file="<input>"):
    return _parse(text, "start_expr", file)


def parse_sequent(text, file="<input>"):
    return _parse(text, "start_sequent", file)


def parse_lf_type(text, file="<input>"):
    return _parse(text, "start_lftype", file)


def parse_signature(text, file="<input>"):
    return _parse(text, "start_signature", file)


def parse_lf_context(text, file="<input>"):
    if not text.strip():
        return lf.EMPTY_LF_CONTEXT
    return _parse(text, "start_lfctx", file)


def parse_lf_term(text, sig=lf.EMPTY_SIGNATURE, ctx=lf.EMPTY_LF_CONTEXT, file="<input>"):
    """Parse a normal term; identifiers bound nowhere but declared in ``sig`` become constants."""
    return resolve_constants(_parse(text, "start_lfterm", file), sig, set(ctx.names()))


def resolve_constants(term, sig, bound=frozenset()):
    if isinstance(term, lf.NLam):
        return lf.NLam(term.binder, resolve_constants(term.body, sig, set(bound) | {term.binder}))
    if isinstance(term, lf.NPair):
        return lf.NPair(resolve_constants(term.left, sig, bound), resolve_constants(term.right, sig, bound))
    if isinstance(term, lf.NAbort):
        return lf.NAbort(term.target, resolve_constants(term.scrutinee, sig, bound))
    if isinstance(term, lf.NNeutral):
        return lf.NNeutral(resolve_constants(term.neutral, sig, bound))
    if isinstance(term, lf.NVar):
        if term.name not in bound and sig.constant_type(term.name) is not None:
            return lf.NConst(term.name)
        return term
    if isinstance(term, lf.NApp):
        return lf.NApp(resolve_constants(term.fun, sig, bound), resolve_constants(term.arg, sig, bound))
    if isinstance(term, lf.NFst):
        return lf.NFst(resolve_constants(term.pair, sig, bound))
    if isinstance(term, lf.NSnd):
        return lf.NSnd(resolve_constants(term.pair, sig, bound))
    return term


# Derivation files


_ESCAPE = re.compile(r'\\([\\"])')


def _unquote(token):
    return _ESCAPE.sub(r"\1", str(token)[1:-1])


class DerivationFile:
    """A parsed derivation file: context evidence plus the main derivation."""

    def __init__(self, derivation, evidence):
        self.derivation = derivation
        self.evidence = evidence


def parse_derivation_file(text, file="<input>"):
    text = normalize_source(text)
    try:
        tree = _derivation_parser().parse(text)
    except UnexpectedInput as error:
        raise _syntax_issue(error, text, file) from None

    def build(node):
        rule, string, *children = node.children
        conclusion = _parse_embedded_sequent(string, text, file)
        span = _span_at(text, rule.line, rule.column, len(rule), file)
        return Derivation(str(rule), conclusion, tuple(build(child) for child in children), span)

    evidence = {}
    main = None
    for item in tree.children:
        if item.data == "evidence":
            name, node = item.children
            evidence[str(name)] = build(node)
        else:
            main = build(item)
    return DerivationFile(main, evidence)


def parse_derivation(text, file="<input>"):
    return parse_derivation_file(text, file).derivation


def _parse_embedded_sequent(token: Token, text, file):
    inner = _unquote(token)
    try:
        return parse_sequent(inner, file)
    except SyntaxIssue as issue:
        # shift the inner location onto the string literal, staying inside it
        width = max(1, token.end_column - token.column)
        if issue.span is not None and issue.span.line == 1 and "\n" not in str(token):
            offset = issue.span.column_start
            column = token.column + min(offset, width - 2 if width > 2 else 1)
        else:
            column = token.column
        raise SyntaxIssue(issue.message, _span_at(text, token.line, column, 1, file)) from None
