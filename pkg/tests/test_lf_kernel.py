import pytest

from dualkernel import lf_kernel as lf
from dualkernel.errors import (
    IntroAgainstWrongType,
    NotAFunction,
    NotAPair,
    NotErasable,
    SignatureError,
    TypeHeadMismatch,
    TypeMismatch,
    UnboundVariable,
    UndeclaredAtom,
)
from dualkernel.lf_kernel import BOT, TOP, Atom, Fn, LfContext, Prod
from dualkernel.parser import parse_expr, parse_lf_context, parse_lf_term, parse_lf_type, parse_signature
from dualkernel.syntax import BULLET, UNIT, VOID, arrow


def T(text):
    return parse_lf_type(text)


def M(text, sig=lf.EMPTY_SIGNATURE, ctx=lf.EMPTY_LF_CONTEXT):
    return parse_lf_term(text, sig, ctx)


def failure(sig, ctx, term, ty):
    result = lf.check(sig, ctx, term, ty)
    assert not result
    return result.error


class TestChecking:
    """Checking normal terms against types."""

    @pytest.mark.parametrize('term,ty', [
        ('tt', 'Top'),
        ('[x] x', '(Top) Top'),
        ('[x] x', '(Bot) Bot'),
        ('[x] tt', '(Bot) Top'),
        ('[x] abort{Top}(x)', '(Bot) Top'),
        ('[f] [x] f x', '((Top) Bot) (Top) Bot'),
        ('<tt, [x] x>', 'Top * ((Bot) Bot)'),
        ('[p] <snd p, fst p>', '(Top * Bot) Bot * Top'),
        ('[x] [y] x', '(Top) (Bot) Top'),
        ('[x] [x] x', '(Top) (Bot) Bot'),
    ])
    def test_accepted(self, term, ty):
        assert lf.check(lf.EMPTY_SIGNATURE, lf.EMPTY_LF_CONTEXT, M(term), T(ty))

    def test_constants_from_signature(self, propositions):
        term = M('[f] f a', propositions)
        assert lf.check(propositions, lf.EMPTY_LF_CONTEXT, term, T('((A) B) B'))

    def test_context_variables(self):
        ctx = parse_lf_context('f : (Top) Bot, x : Top')
        assert lf.check(lf.EMPTY_SIGNATURE, ctx, M('f x', ctx=ctx), BOT)

    def test_binder_shadowing_context_is_renamed(self):
        ctx = LfContext.of(('x', BOT))
        assert lf.check(lf.EMPTY_SIGNATURE, ctx, M('[x] x', ctx=ctx), T('(Top) Top'))

    def test_intro_against_wrong_type(self):
        error = failure(lf.EMPTY_SIGNATURE, lf.EMPTY_LF_CONTEXT, M('tt'), BOT)
        assert isinstance(error, IntroAgainstWrongType)
        assert isinstance(failure(lf.EMPTY_SIGNATURE, lf.EMPTY_LF_CONTEXT, M('[x] x'), TOP), IntroAgainstWrongType)
        assert isinstance(failure(lf.EMPTY_SIGNATURE, lf.EMPTY_LF_CONTEXT, M('<tt, tt>'), TOP), IntroAgainstWrongType)

    def test_mismatched_neutral(self):
        error = failure(lf.EMPTY_SIGNATURE, lf.EMPTY_LF_CONTEXT, M('[x] x'), T('(Top) Bot'))
        assert isinstance(error, TypeMismatch)
        assert error.expected == BOT and error.inferred == TOP

    def test_abort_annotation_must_match(self):
        error = failure(lf.EMPTY_SIGNATURE, lf.EMPTY_LF_CONTEXT, M('[x] abort{Bot}(x)'), T('(Bot) Top'))
        assert isinstance(error, TypeMismatch)

    def test_abort_needs_bottom(self):
        error = failure(lf.EMPTY_SIGNATURE, lf.EMPTY_LF_CONTEXT, M('[x] abort{Top}(x)'), T('(Top) Top'))
        assert isinstance(error, TypeMismatch)
        assert error.expected == BOT

    def test_unbound_variable(self):
        assert isinstance(failure(lf.EMPTY_SIGNATURE, lf.EMPTY_LF_CONTEXT, M('y'), TOP), UnboundVariable)

    def test_undeclared_atom(self):
        assert isinstance(failure(lf.EMPTY_SIGNATURE, lf.EMPTY_LF_CONTEXT, M('[x] x'), T('(P) P')), UndeclaredAtom)


class TestInference:
    def test_variable(self):
        ctx = LfContext.of(('p', T('Top * Bot')))
        assert lf.infer(lf.EMPTY_SIGNATURE, ctx, lf.NSnd(lf.NVar('p'))) == BOT

    def test_application(self):
        ctx = LfContext.of(('f', T('(Top) (Bot) Top')))
        term = M('f tt', ctx=ctx)
        assert lf.infer(lf.EMPTY_SIGNATURE, ctx, term.neutral) == T('(Bot) Top')

    def test_constant(self, propositions):
        assert lf.infer(propositions, lf.EMPTY_LF_CONTEXT, lf.NConst('a')) == Atom('A')

    def test_not_a_function(self):
        ctx = LfContext.of(('x', TOP))
        with pytest.raises(NotAFunction):
            lf.infer(lf.EMPTY_SIGNATURE, ctx, lf.NApp(lf.NVar('x'), lf.NBullet()))

    def test_not_a_pair(self):
        ctx = LfContext.of(('x', TOP))
        with pytest.raises(NotAPair):
            lf.infer(lf.EMPTY_SIGNATURE, ctx, lf.NFst(lf.NVar('x')))

    def test_argument_is_checked(self):
        ctx = LfContext.of(('f', T('(Bot) Top')))
        with pytest.raises(IntroAgainstWrongType):
            lf.infer(lf.EMPTY_SIGNATURE, ctx, lf.NApp(lf.NVar('f'), lf.NBullet()))

    def test_unknown_constant(self):
        with pytest.raises(UnboundVariable):
            lf.infer(lf.EMPTY_SIGNATURE, lf.EMPTY_LF_CONTEXT, lf.NConst('c'))


class TestSignatures:
    """Signatures and contexts are well-formed."""

    def test_parse_signature(self, propositions):
        assert propositions.names() == ['A', 'B', 'a']
        assert propositions.has_atom('A')
        assert propositions.constant_type('a') == Atom('A')
        assert propositions.constant_type('A') is None

    def test_duplicate_declaration(self):
        with pytest.raises(SignatureError):
            lf.EMPTY_SIGNATURE.declare_atom('A').declare_atom('A')

    def test_constant_with_undeclared_atom(self):
        with pytest.raises(SignatureError):
            lf.EMPTY_SIGNATURE.declare_constant('c', Atom('P'))

    def test_check_type(self, propositions):
        assert lf.check_type(propositions, T('(A) B * Top'))
        assert isinstance(lf.check_type(propositions, T('(C) A')).error, UndeclaredAtom)

    def test_check_context(self, propositions):
        assert lf.check_context(propositions, LfContext.of(('x', Atom('A'))))
        assert isinstance(lf.check_context(propositions, LfContext.of(('x', Atom('Q')))).error, UndeclaredAtom)
        duplicated = LfContext.of(('x', TOP), ('x', BOT))
        assert isinstance(lf.check_context(propositions, duplicated).error, SignatureError)

    def test_context_extend_rejects_duplicates(self):
        with pytest.raises(SignatureError):
            LfContext.of(('x', TOP)).extend('x', BOT)


class TestHereditarySubstitution:
    """hsubst contracts the redexes it creates."""

    def test_variable_replaced(self):
        assert lf.hsubst(lf.NBullet(), 'x', TOP, lf.var('x')) == lf.NBullet()

    def test_beta_redex_contracted(self):
        body = M('f tt')
        result = lf.hsubst(M('[y] y'), 'f', T('(Top) Top'), body)
        assert result == lf.NBullet()

    def test_nested_redexes(self):
        # [λg. g tt / f] (f (λy. y)) reduces twice
        body = M('f ([y] y)')
        result = lf.hsubst(M('[g] g tt'), 'f', T('((Top) Top) Top'), body)
        assert result == lf.NBullet()

    def test_projection_contracted(self):
        result = lf.hsubst(M('<tt, [z] z>'), 'p', T('Top * ((Bot) Bot)'), M('snd p'))
        assert lf.lf_eq(result, M('[z] z'))

    def test_projection_then_application(self):
        result = lf.hsubst(M('<[z] z, tt>'), 'p', T('((Top) Top) * Top'), M('fst p tt'))
        assert result == lf.NBullet()

    def test_abort_commutes_with_application(self):
        n = M('abort{(Top) Top}(b)')
        result = lf.hsubst(n, 'f', T('(Top) Top'), M('f tt'))
        assert result == lf.NAbort(TOP, lf.NVar('b'))

    def test_abort_commutes_with_projection(self):
        n = M('abort{Top * Bot}(b)')
        result = lf.hsubst(n, 'p', T('Top * Bot'), M('fst p'))
        assert result == lf.NAbort(TOP, lf.NVar('b'))

    def test_abort_of_abort(self):
        result = lf.hsubst(M('abort{Bot}(b)'), 'y', BOT, M('abort{Top}(y)'))
        assert result == lf.NAbort(TOP, lf.NVar('b'))

    def test_bound_variable_is_not_replaced(self):
        m = M('[x] x')
        assert lf.hsubst(lf.NBullet(), 'x', TOP, m) == m

    def test_capture_avoided(self):
        result = lf.hsubst(lf.var('y'), 'x', None, M('[y] x'))
        assert result == lf.NLam("y'", lf.var('y'))
        assert not lf.lf_eq(result, M('[y] y'))

    def test_ill_typed_head(self):
        with pytest.raises(TypeHeadMismatch):
            lf.hsubst(lf.NBullet(), 'f', TOP, M('f tt'))

    def test_projection_of_non_pair(self):
        with pytest.raises(TypeHeadMismatch):
            lf.hsubst(M('[z] z'), 'p', T('Top * Top'), M('fst p'))

    def test_result_checks(self):
        # Γ, x:A ⊢ m ⇐ B and Γ ⊢ n ⇐ A give Γ ⊢ [n/x]m ⇐ B
        ctx = LfContext.of(('x', T('(Top) Top')))
        m = M('<x tt, [y] x y>', ctx=ctx)
        b = T('Top * ((Top) Top)')
        assert lf.check(lf.EMPTY_SIGNATURE, ctx, m, b)
        n = M('[z] z')
        result = lf.hsubst(n, 'x', T('(Top) Top'), m)
        assert lf.check(lf.EMPTY_SIGNATURE, lf.EMPTY_LF_CONTEXT, result, b)
        assert lf.lf_eq(result, M('<tt, [y] y>'))


class TestEquality:
    def test_alpha(self):
        assert lf.lf_eq(M('[x] [y] x'), M('[a] [b] a'))
        assert not lf.lf_eq(M('[x] [y] x'), M('[a] [b] b'))

    def test_free_variables_compared_by_name(self):
        assert lf.lf_eq(M('f tt'), M('f tt'))
        assert not lf.lf_eq(M('f tt'), M('g tt'))

    def test_bound_versus_free(self):
        assert not lf.lf_eq(M('[x] x'), M('[y] x'))

    def test_abort_targets(self):
        assert not lf.lf_eq(M('abort{Top}(b)'), M('abort{Bot}(b)'))

    def test_type_equality(self):
        assert lf.lf_type_eq(T('(Top) Bot * Top'), Fn(TOP, Prod(BOT, TOP)))


class TestErasure:
    """Proof terms and types map to computational terms."""

    def test_terms(self):
        assert lf.erase(M('tt')) == BULLET
        assert lf.erase(M('[x] x')) == parse_expr(r'\x. x')
        assert lf.erase(M('[f] [x] f x')) == parse_expr(r'\f. \x. f x')

    def test_free_variables_are_kept(self):
        assert lf.erase(M('f tt')) == parse_expr('f tt')

    def test_types(self):
        assert lf.erase_type(TOP) == UNIT
        assert lf.erase_type(BOT) == VOID
        assert lf.erase_type(T('((Top) Bot) Top')) == arrow(arrow(UNIT, VOID), UNIT)

    @pytest.mark.parametrize('text', ['<tt, tt>', '[p] fst p', '[b] abort{Top}(b)'])
    def test_terms_outside_the_fragment(self, text):
        with pytest.raises(NotErasable):
            lf.erase(M(text))

    def test_constants_are_not_erasable(self, propositions):
        with pytest.raises(NotErasable):
            lf.erase(M('a', propositions))

    @pytest.mark.parametrize('text', ['A', 'Top * Top', '(Top) A'])
    def test_types_outside_the_fragment(self, text):
        with pytest.raises(NotErasable):
            lf.erase_type(T(text))


class TestSize:
    def test_lf_size(self):
        assert lf.lf_size(M('tt')) == 1
        assert lf.lf_size(M('[x] x')) == 2
        assert lf.lf_size(M('f <tt, x>')) == 5


def test_parse_signature_round_trip_shape():
    sig = parse_signature('atom P; const p : (P) P;')
    assert sig.declarations == (lf.AtomDecl('P'), lf.ConstDecl('p', Fn(Atom('P'), Atom('P'))))
