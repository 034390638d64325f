import itertools

import pytest

from dualkernel import lf_kernel as lf
from dualkernel.ctt_rules import EqSet, EqVer, IsSet, SequentJudgement, Ver
from dualkernel.errors import SyntaxIssue
from dualkernel.parser import (
    RESERVED,
    parse_derivation,
    parse_derivation_file,
    parse_expr,
    parse_lf_context,
    parse_lf_term,
    parse_lf_type,
    parse_sequent,
    parse_signature,
)
from dualkernel.printer import (
    print_derivation,
    print_derivation_file,
    print_expr,
    print_lf_context,
    print_lf_term,
    print_lf_type,
    print_sequent,
    print_signature,
)
from dualkernel.syntax import BULLET, UNIT, VOID, Ap, Bound, Context, Lam, Var, arrow, lam
from dualkernel.testing import exprs_of_size, lf_normals, lf_types
from tests.corpus import ACCEPTED, WITH_EVIDENCE


class TestParseExpr:
    """Concrete syntax of computational terms."""

    def test_applied_identity(self):
        assert parse_expr(r'(\x. x) tt') == Ap(Lam(Bound(0), 'x'), BULLET)

    def test_application_is_left_associative(self):
        assert parse_expr('f a b') == Ap(Ap(Var('f'), Var('a')), Var('b'))

    def test_lambda_body_extends_right(self):
        assert parse_expr(r'\x. x tt') == lam('x', Ap(Var('x'), BULLET))

    def test_pi(self):
        assert parse_expr('Pi (x : Unit) Void') == arrow(UNIT, VOID)

    def test_binder_hint_is_kept(self):
        assert parse_expr(r'\foo. foo').binder == 'foo'

    def test_comments_and_line_endings(self):
        assert parse_expr('tt -- the unit element\r\n') == BULLET

    def test_primes_in_identifiers(self):
        assert parse_expr("x'") == Var("x'")

    def test_identifiers_may_start_with_keywords(self):
        assert parse_expr('inner settle') == Ap(Var('inner'), Var('settle'))


class TestPrintExpr:
    @pytest.mark.parametrize('text', [
        r'\x. \y. x y',
        r'(\x. x) tt',
        r'f (g x)',
        r'f a b',
        r'Pi (x : Unit) Pi (y : Void) Unit',
        r'Pi (f : Pi (x : Unit) Unit) Unit',
        r'(\x. x) (\y. y)',
        r'f (\x. x)',
        r'(Pi (x : Unit) Unit) tt',
        r'\x. (\y. y) x',
    ])
    def test_minimal_parentheses(self, text):
        assert print_expr(parse_expr(text)) == text

    def test_redundant_parentheses_dropped(self):
        assert print_expr(parse_expr(r'((f) (a)) ((\x. (x)))')) == r'f a (\x. x)'

    def test_clashing_binder_is_primed(self):
        assert print_expr(Lam(Var('x'), 'x')) == r"\x'. x"

    def test_shadowing_is_printed_without_renaming(self):
        assert print_expr(Lam(Lam(Bound(0)))) == r'\x. \x. x'
        assert print_expr(Lam(Lam(Bound(1)))) == r"\x. \x'. x"

    def test_reserved_hint_is_replaced(self):
        assert print_expr(Lam(Bound(0), 'Pi')) == r'\x. x'

    def test_dangling_index(self):
        assert print_expr(Bound(3)) == '#3'


class TestSequents:
    @pytest.mark.parametrize('text,body', [
        ('. >> Unit set', IsSet(UNIT)),
        ('. >> Unit = Void set', EqSet(UNIT, VOID)),
        ('. >> tt in Unit', Ver(BULLET, UNIT)),
        ('. >> tt = tt in Unit', EqVer(BULLET, BULLET, UNIT)),
    ])
    def test_bodies(self, text, body):
        assert parse_sequent(text) == SequentJudgement(Context(), body)
        assert print_sequent(parse_sequent(text)) == text

    def test_context(self):
        judgement = parse_sequent('. , x : Unit, f : Pi (y : Unit) Void >> f x in Void')
        assert judgement.context.names() == ['x', 'f']
        assert print_sequent(judgement) == '. , x : Unit, f : Pi (y : Unit) Void >> f x in Void'


class TestLf:
    """Types, terms, signatures and contexts of the proof-theoretic kernel."""

    @pytest.mark.parametrize('text', [
        'Top',
        '(Top) Bot',
        '((Top) Bot) Top',
        '(Top) (Bot) Top',
        'Top * Bot * Top',
        '(Top * Bot) Top',
        '(Top) Top * Bot',
        '((Top) Top) * Bot',
        'Top * ((Top) Top)',
        'A',
    ])
    def test_types_round_trip(self, text):
        assert print_lf_type(parse_lf_type(text)) == text

    def test_product_associates_right(self):
        assert parse_lf_type('Top * Bot * Top') == lf.Prod(lf.TOP, lf.Prod(lf.BOT, lf.TOP))

    def test_function_type(self):
        assert parse_lf_type('(Top) (Bot) Top') == lf.Fn(lf.TOP, lf.Fn(lf.BOT, lf.TOP))

    @pytest.mark.parametrize('text', [
        'tt',
        '[x] x',
        '[f] [x] f x',
        '<tt, [x] x>',
        '[p] fst p',
        '[p] snd (fst p)',
        '[f] f tt <tt, tt>',
        '[f] f ([x] x)',
        '[f] [g] f (g tt)',
        '[b] abort{(Top) Top}(b)',
        '[b] [f] f (abort{Top}(b))',
        '[p] fst p tt',
    ])
    def test_terms_round_trip(self, text):
        assert print_lf_term(parse_lf_term(text)) == text

    def test_constants_resolved_against_signature(self, propositions):
        term = parse_lf_term('[a] a', propositions)
        assert term == lf.NLam('a', lf.var('a'))
        assert parse_lf_term('a', propositions) == lf.NNeutral(lf.NConst('a'))

    def test_context_shadows_constants(self, propositions):
        ctx = lf.LfContext.of(('a', lf.TOP))
        assert parse_lf_term('a', propositions, ctx) == lf.var('a')

    @pytest.mark.parametrize('text', ['([x] x) tt', 'fst <tt, tt>', '(tt) tt', 'abort{Top}([x] x)'])
    def test_redexes_cannot_be_written(self, text):
        with pytest.raises(SyntaxIssue):
            parse_lf_term(text)

    def test_signature(self, propositions):
        assert print_signature(propositions) == 'atom A;\natom B;\nconst a : A;'
        assert parse_signature(print_signature(propositions)) == propositions

    def test_empty_signature(self):
        assert parse_signature('') == lf.EMPTY_SIGNATURE

    def test_signature_errors_are_syntax_issues(self):
        with pytest.raises(SyntaxIssue):
            parse_signature('atom A; atom A;')
        with pytest.raises(SyntaxIssue):
            parse_signature('const c : P;')

    def test_context(self):
        ctx = parse_lf_context('x : Top, f : (Top) Bot')
        assert ctx == lf.LfContext.of(('x', lf.TOP), ('f', lf.Fn(lf.TOP, lf.BOT)))
        assert print_lf_context(ctx) == 'x : Top, f : (Top) Bot'
        assert parse_lf_context('') == parse_lf_context('.') == lf.EMPTY_LF_CONTEXT
        assert print_lf_context(lf.EMPTY_LF_CONTEXT) == '.'


class TestDerivations:
    def test_structure(self):
        d = parse_derivation('(PI-F ". >> Pi (x : Unit) Unit set" (UNIT-F ". >> Unit set") '
                             '(UNIT-F ". , x : Unit >> Unit set"))')
        assert d.rule == 'PI-F'
        assert [child.rule for child in d.children] == ['UNIT-F', 'UNIT-F']
        assert d.children[1].conclusion.context.names() == ['x']

    def test_spans_point_at_rule_names(self):
        d = parse_derivation('(UNIT-I ". >> tt in Unit")\n')
        assert (d.span.line, d.span.column_start, d.span.column_end) == (1, 2, 7)

    def test_escaped_backslash(self):
        d = parse_derivation(r'(UNIT-I ". >> (\\x. x) tt in Unit")')
        assert d.conclusion.body.m == parse_expr(r'(\x. x) tt')

    def test_evidence(self):
        parsed = parse_derivation_file(WITH_EVIDENCE[0])
        assert list(parsed.evidence) == ['x']
        assert parsed.derivation.rule == 'HYP'

    @pytest.mark.parametrize('text', ACCEPTED)
    def test_corpus_round_trip(self, text):
        d = parse_derivation(text)
        assert parse_derivation(print_derivation(d)) == d

    @pytest.mark.parametrize('text', WITH_EVIDENCE)
    def test_evidence_round_trip(self, text):
        parsed = parse_derivation_file(text)
        again = parse_derivation_file(print_derivation_file(parsed.derivation, parsed.evidence))
        assert again.derivation == parsed.derivation
        assert again.evidence == parsed.evidence


class TestSyntaxErrors:
    """Every syntax error carries a span inside the input."""

    @pytest.mark.parametrize('parse,text', [
        (parse_expr, r'\x x'),
        (parse_expr, ''),
        (parse_expr, '   \n\t  '),
        (parse_expr, '(tt'),
        (parse_expr, 'tt)'),
        (parse_expr, 'Pi x : Unit. Unit'),
        (parse_expr, '\\x.\n\n  ?'),
        (parse_expr, r'\in. in'),
        (parse_expr, r'\Top. Top'),
        (parse_sequent, '. >> tt'),
        (parse_sequent, 'x : Unit >> x in Unit'),
        (parse_lf_type, '(Top'),
        (parse_lf_type, 'Top * (Bot) Bot'),
        (parse_lf_term, '[x]'),
        (parse_lf_term, 'abort{Top}'),
        (parse_derivation, '(UNIT-F ". >> Unit set"'),
        (parse_derivation, '(UNIT-F ". >> Unit sett")'),
        (parse_derivation, '(UNIT-F ". >> Unit set") extra'),
        (parse_derivation, '(unit-f ". >> Unit set")'),
        (parse_derivation, '(UNIT-F ". >> \\\\x. (x")'),
    ])
    def test_span_in_bounds(self, parse, text):
        with pytest.raises(SyntaxIssue) as info:
            parse(text)
        span = info.value.span
        lines = text.replace('\r\n', '\n').split('\n')
        assert 1 <= span.line <= len(lines)
        assert 1 <= span.column_start <= span.column_end <= max(1, len(lines[span.line - 1]))

    def test_location_of_error(self):
        with pytest.raises(SyntaxIssue) as info:
            parse_expr('tt\n  tt ?', file='broken.ctt')
        assert info.value.span.file == 'broken.ctt'
        assert info.value.span.line == 2
        assert info.value.span.column_start == 6

    def test_reserved_words(self):
        assert {'Unit', 'Void', 'tt', 'Pi', 'in', 'set'} <= RESERVED


def _closed_exprs_up_to(max_size):
    return itertools.chain.from_iterable(exprs_of_size(size) for size in range(1, max_size + 1))


def _assert_expr_round_trips(max_size):
    checked = 0
    for e in _closed_exprs_up_to(max_size):
        text = print_expr(e)
        assert parse_expr(text) == e, text
        checked += 1
    return checked


class TestRoundTrip:
    """parse(print(e)) is e up to renaming of bound variables."""

    def test_enumerated_exprs(self):
        assert _assert_expr_round_trips(6) > 1000

    @pytest.mark.slow
    def test_enumerated_exprs_exhaustive(self):
        assert _assert_expr_round_trips(8) > 50000

    def test_open_exprs(self):
        for size in range(1, 6):
            for scope in exprs_of_size(size, 1):
                e = Lam(scope, 'y')
                body = Ap(e, Var('y'))
                assert parse_expr(print_expr(body)) == body

    def test_enumerated_lf_terms(self):
        checked = 0
        for size in range(1, 7):
            for m in lf_normals(size):
                assert parse_lf_term(print_lf_term(m)) == m, print_lf_term(m)
                checked += 1
        assert checked > 100

    def test_enumerated_lf_types(self):
        for ty in lf_types(2, atoms=('P',)):
            assert parse_lf_type(print_lf_type(ty)) == ty

    def test_sequents_from_corpus(self):
        for text in ACCEPTED:
            for node in _nodes(parse_derivation(text)):
                assert parse_sequent(print_sequent(node.conclusion)) == node.conclusion


def _nodes(d):
    yield d
    for child in d.children:
        yield from _nodes(child)
