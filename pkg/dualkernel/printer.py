"""Pretty-printers producing text the parsers read back.

Expressions get minimal parentheses; bound variables are renamed with primes
only when their hint would clash with a free variable of the body.
"""

import re

from dualkernel import lf_kernel as lf
from dualkernel.ctt_rules import EqSet, EqVer, IsSet, Ver
from dualkernel.parser import RESERVED
from dualkernel.syntax import Ap, Bound, Bullet, Lam, Pi, Unit, Var, Void, open_with_fresh

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")

_TOP, _APP, _ATOM = 0, 1, 2


def _hint(binder):
    if not isinstance(binder, str) or not _IDENT.match(binder) or binder in RESERVED:
        return "x"
    return binder


def _open(binder_expr):
    hinted = type(binder_expr)(*_fields(binder_expr), _hint(binder_expr.binder))
    return open_with_fresh(hinted)


def _fields(e):
    return (e.dom, e.scope) if isinstance(e, Pi) else (e.scope,)


def print_expr(e, level=_TOP):
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unit):
        return "Unit"
    if isinstance(e, Void):
        return "Void"
    if isinstance(e, Bullet):
        return "tt"
    if isinstance(e, Bound):
        return f"#{e.index}"
    if isinstance(e, Lam):
        name, body = _open(e)
        text = f"\\{name}. {print_expr(body)}"
        return text if level == _TOP else f"({text})"
    if isinstance(e, Pi):
        name, cod = _open(e)
        text = f"Pi ({name} : {print_expr(e.dom)}) {print_expr(cod)}"
        return text if level == _TOP else f"({text})"
    if isinstance(e, Ap):
        text = f"{print_expr(e.fun, _APP)} {print_expr(e.arg, _ATOM)}"
        return f"({text})" if level == _ATOM else text
    raise TypeError(f"not an expression: {e!r}")


def print_context(ctx):
    if not len(ctx):
        return "."
    return ". , " + ", ".join(f"{name} : {print_expr(ty)}" for name, ty in ctx)


def print_body(body):
    if isinstance(body, IsSet):
        return f"{print_expr(body.a)} set"
    if isinstance(body, EqSet):
        return f"{print_expr(body.a)} = {print_expr(body.b)} set"
    if isinstance(body, Ver):
        return f"{print_expr(body.m)} in {print_expr(body.a)}"
    if isinstance(body, EqVer):
        return f"{print_expr(body.m)} = {print_expr(body.n)} in {print_expr(body.a)}"
    raise TypeError(f"not a judgement body: {body!r}")


def print_sequent(judgement):
    return f"{print_context(judgement.context)} >> {print_body(judgement.body)}"


# Derivations


def _quote(text):
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def print_derivation(d, indent=0):
    """S-expression form accepted by ``parse_derivation``."""
    pad = "  " * indent
    head = f"{pad}({d.rule} {_quote(print_sequent(d.conclusion))}"
    if not d.children:
        return head + ")"
    children = "\n".join(print_derivation(child, indent + 1) for child in d.children)
    return f"{head}\n{children})"


def print_derivation_file(derivation, evidence=None):
    parts = [
        f"(evidence {name}\n{print_derivation(witness, 1)})" for name, witness in (evidence or {}).items()
    ]
    parts.append(print_derivation(derivation))
    return "\n".join(parts)


# LF


def print_lf_type(ty, level=_TOP):
    if isinstance(ty, lf.Atom):
        return ty.name
    if isinstance(ty, lf.LTop):
        return "Top"
    if isinstance(ty, lf.LBot):
        return "Bot"
    if isinstance(ty, lf.Fn):
        text = f"({print_lf_type(ty.dom)}) {print_lf_type(ty.cod)}"
        return text if level == _TOP else f"({text})"
    if isinstance(ty, lf.Prod):
        text = f"{print_lf_type(ty.left, _ATOM)} * {print_lf_type(ty.right, _APP)}"
        return text if level < _ATOM else f"({text})"
    raise TypeError(f"not an LF type: {ty!r}")


def print_lf_term(m):
    if isinstance(m, lf.NBullet):
        return "tt"
    if isinstance(m, lf.NLam):
        return f"[{m.binder}] {print_lf_term(m.body)}"
    if isinstance(m, lf.NPair):
        return f"<{print_lf_term(m.left)}, {print_lf_term(m.right)}>"
    if isinstance(m, lf.NAbort):
        return f"abort{{{print_lf_type(m.target)}}}({print_lf_term(m.scrutinee)})"
    if isinstance(m, lf.NNeutral):
        return print_lf_term(m.neutral)
    if isinstance(m, (lf.NVar, lf.NConst)):
        return m.name
    if isinstance(m, lf.NApp):
        return f"{print_lf_term(m.fun)} {_lf_arg(m.arg)}"
    if isinstance(m, (lf.NFst, lf.NSnd)):
        keyword = "fst" if isinstance(m, lf.NFst) else "snd"
        return f"{keyword} {_lf_head(m.pair)}"
    raise TypeError(f"not an LF term: {m!r}")


def _lf_arg(n):
    if isinstance(n, (lf.NBullet, lf.NPair)):
        return print_lf_term(n)
    if isinstance(n, lf.NNeutral) and isinstance(n.neutral, (lf.NVar, lf.NConst)):
        return n.neutral.name
    return f"({print_lf_term(n)})"


def _lf_head(r):
    if isinstance(r, (lf.NVar, lf.NConst)):
        return r.name
    return f"({print_lf_term(r)})"


def print_signature(sig):
    lines = []
    for decl in sig.declarations:
        if isinstance(decl, lf.AtomDecl):
            lines.append(f"atom {decl.name};")
        else:
            lines.append(f"const {decl.name} : {print_lf_type(decl.type)};")
    return "\n".join(lines)


def print_lf_context(ctx):
    if not len(ctx):
        return "."
    return ", ".join(f"{name} : {print_lf_type(ty)}" for name, ty in ctx)
