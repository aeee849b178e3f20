import pytest
from hypothesis import given, strategies as st

from knowwh.formulas import (ALL_TAGS, And, ArityError, Atom, BoxK, Formula,
                             Ident, LanguageError, LanguageProfile, Not,
                             ParseError, SubstitutionError, Var, Wh, WhTag,
                             box_b, dia_b, dia_k, free_vars, fresh_var, iff,
                             implies, or_, parse, predicates, pretty,
                             substitute, syntactic_equal, tags_used,
                             uses_identity)

x, y, z = Var("x"), Var("y"), Var("z")
P = lambda *args: Atom("P", args)
Q = lambda *args: Atom("Q", args)


def test_parse_wh_binder():
    assert parse("wh[K_MS x] P(x)") == Wh(WhTag.K_MS, x, P(x))


def test_parse_belief_expands_to_diamond_box():
    # [B]p is stored as <K>[K]p, i.e. ~[K]~[K]p.
    assert parse("[B] P(y)") == Not(BoxK(Not(BoxK(P(y)))))


def test_parse_arity_mismatch():
    profile = LanguageProfile.single(WhTag.K_MS, signature={"P": 1})
    with pytest.raises(ArityError):
        parse("P(x,y)", profile)


def test_parse_inconsistent_arity_within_formula():
    with pytest.raises(ArityError):
        parse("P(x) & P(x,y)")


def test_parse_closed_signature_rejects_unknown_predicate():
    profile = LanguageProfile.single(WhTag.K_MS, signature={"P": 1})
    with pytest.raises(LanguageError):
        parse("R(x)", profile)


def test_parse_profile_tag_restriction():
    profile = LanguageProfile.single(WhTag.K_MS)
    with pytest.raises(LanguageError):
        parse("wh[tB_MS x] P(x)", profile)


def test_parse_profile_identity_restriction():
    profile = LanguageProfile.single(WhTag.K_MS, identity=False)
    with pytest.raises(LanguageError):
        parse("x = y", profile)
    assert parse("x = y") == Ident(x, y)


def test_parse_derived_connectives_expand():
    assert parse("P(x) | Q(x)") == Not(And(Not(P(x)), Not(Q(x))))
    assert parse("P(x) -> Q(x)") == Not(And(P(x), Not(Q(x))))
    assert parse("<K> P(x)") == Not(BoxK(Not(P(x))))
    assert parse("P(x) <-> Q(x)") == And(
        Not(And(P(x), Not(Q(x)))), Not(And(Q(x), Not(P(x)))))


def test_parse_implication_right_associative():
    assert parse("P(x) -> Q(x) -> P(y)") == implies(P(x), implies(Q(x), P(y)))


def test_parse_zero_ary_atom():
    assert parse("Q0()") == Atom("Q0", ())


def test_parse_syntax_error_carries_position():
    with pytest.raises(ParseError) as e:
        parse("P(x) &")
    assert e.value.pos is not None


def test_free_vars():
    assert free_vars(Wh(WhTag.K_MS, x, Atom("P", (x, y)))) == {y}
    assert free_vars(BoxK(P(x))) == {x}
    assert free_vars(Atom("Q0", ())) == frozenset()
    assert free_vars(Ident(x, y)) == {x, y}


def test_substitute_basic():
    assert substitute(box_b(P(x)), y, x) == box_b(P(y))


def test_substitute_capture_is_rejected():
    f = Wh(WhTag.K_MS, y, Atom("Q", (x, y)))
    with pytest.raises(SubstitutionError):
        substitute(f, y, x)


def test_substitute_under_other_binder():
    f = Wh(WhTag.K_MS, z, Atom("Q", (x, z)))
    assert substitute(f, y, x) == Wh(WhTag.K_MS, z, Atom("Q", (y, z)))


def test_substitute_stops_at_own_binder():
    f = Wh(WhTag.K_MS, x, Atom("Q", (x, y)))
    assert substitute(f, z, x) == f


def test_syntactic_equality_is_not_alpha_equivalence():
    assert not syntactic_equal(Wh(WhTag.K_MS, x, P(x)), Wh(WhTag.K_MS, y, P(y)))
    assert not syntactic_equal(And(P(x), Q(x)), And(Q(x), P(x)))


def test_pretty_uses_sugar():
    assert pretty(box_b(P(x))) == "[B]P(x)"
    assert pretty(dia_k(P(x))) == "<K>P(x)"
    assert pretty(implies(P(x), Q(x))) == "(P(x) -> Q(x))"
    assert pretty(or_(P(x), Q(x))) == "(P(x) | Q(x))"
    assert pretty(iff(P(x), Q(x))) == "(P(x) <-> Q(x))"


def test_predicates_and_tags_and_identity():
    f = parse("wh[K_MS x](P(x) & Q(x,y)) & x = y")
    assert predicates(f) == {"P": 1, "Q": 2}
    assert tags_used(f) == {WhTag.K_MS}
    assert uses_identity(f)


def test_fresh_var_skips_taken_names():
    assert fresh_var({Var("a"), Var("b")}) == Var("c")
    assert fresh_var(set()) == Var("a")


# Random AST generation for the round-trip property.

_vars = st.sampled_from([x, y, z])


def _atoms() -> st.SearchStrategy[Formula]:
    unary = st.builds(lambda v: Atom("P", (v,)), _vars)
    binary = st.builds(lambda a, b: Atom("Q", (a, b)), _vars, _vars)
    zero = st.just(Atom("R0", ()))
    ident = st.builds(Ident, _vars, _vars)
    return st.one_of(unary, binary, zero, ident)


def _formulas() -> st.SearchStrategy[Formula]:
    return st.recursive(
        _atoms(),
        lambda sub: st.one_of(
            st.builds(Not, sub),
            st.builds(And, sub, sub),
            st.builds(BoxK, sub),
            st.builds(Wh, st.sampled_from(ALL_TAGS), _vars, sub),
            st.builds(implies, sub, sub),
            st.builds(or_, sub, sub),
            st.builds(iff, sub, sub),
            st.builds(dia_k, sub),
            st.builds(box_b, sub),
            st.builds(dia_b, sub),
        ),
        max_leaves=12,
    )


@given(_formulas())
def test_roundtrip(f):
    assert parse(pretty(f)) == f


@given(_formulas())
def test_substitution_identity(f):
    assert substitute(f, x, x) == f


@given(_formulas())
def test_substitution_free_var_contract(f):
    if x not in free_vars(f):
        return
    try:
        g = substitute(f, y, x)
    except SubstitutionError:
        return
    assert free_vars(g) == (free_vars(f) - {x}) | {y}
