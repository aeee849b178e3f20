import pytest
from hypothesis import given, strategies as st

from knowwh.formulas import (ALL_TAGS, And, Atom, BoxK, Not, Var, Wh, WhTag,
                             box_b, dia_k, implies, or_, parse)
from knowwh.models import FrameClass, Model, enumerate_models, load_model
from knowwh.semantics import (EvalError, FrameError, satisfies,
                              satisfies_trace, satisfies_via_rb,
                              valid_in_model)

x, y = Var("x"), Var("y")

NEWSTOPIA = load_model(
    "worlds: w0 w1\n"
    "domain: n p\n"
    "rel: w0->w0 w0->w1 w1->w1\n"
    "pred S@w0: n\n"
    "pred S@w1: n p\n"
)

SINGLE = load_model("worlds: w0\ndomain: a b\nrel: w0->w0\npred P@w0: a\n")


def test_newstopia_belief_values():
    # The agent knows S(n) outright and believes S(p) erroneously.
    assert satisfies(NEWSTOPIA, "w0", {x: "n"}, box_b(Atom("S", (x,))))
    assert satisfies(NEWSTOPIA, "w0", {x: "p"}, box_b(Atom("S", (x,))))
    assert not satisfies(NEWSTOPIA, "w0", {x: "p"}, Atom("S", (x,)))


@pytest.mark.parametrize("tag,expected", [
    (WhTag.TB_MS, True),
    (WhTag.K_MS, True),
    (WhTag.TB_MS_FS, False),
    (WhTag.K_MS_FS, False),
])
def test_newstopia_wh_operators(tag, expected):
    f = Wh(tag, x, Atom("S", (x,)))
    assert satisfies(NEWSTOPIA, "w0", {}, f) == expected


def test_tautology_holds_anywhere():
    f = or_(Atom("P", (x,)), Not(Atom("P", (x,))))
    assert satisfies(SINGLE, "w0", {x: "b"}, f)
    assert valid_in_model(SINGLE, f)


def test_reflexive_knowledge_is_factive():
    f = implies(BoxK(Atom("P", (x,))), Atom("P", (x,)))
    assert valid_in_model(SINGLE, f)
    assert valid_in_model(NEWSTOPIA, implies(BoxK(Atom("S", (x,))), Atom("S", (x,))))


def test_newstopia_fs_failure_is_model_level():
    assert not valid_in_model(NEWSTOPIA, Wh(WhTag.K_MS_FS, x, Atom("S", (x,))))


def test_zero_ary_validity():
    f = implies(Atom("R0", ()), Atom("R0", ()))
    assert valid_in_model(SINGLE, f)


def test_unassigned_variable_raises():
    with pytest.raises(EvalError):
        satisfies(SINGLE, "w0", {}, Atom("P", (x,)))


def test_unknown_world_raises():
    with pytest.raises(EvalError):
        satisfies(SINGLE, "w9", {}, Atom("R0", ()))


def test_binder_ignores_outer_binding_of_same_variable():
    f = Wh(WhTag.K_MS, x, Atom("P", (x,)))
    assert satisfies(SINGLE, "w0", {x: "a"}, f) == \
        satisfies(SINGLE, "w0", {x: "b"}, f)


def test_rb_semantics_on_newstopia():
    # The only belief successor of w0 is w1, where S(p) holds.
    assert satisfies_via_rb(NEWSTOPIA, "w0", {x: "p"}, box_b(Atom("S", (x,))))


def test_rb_semantics_trivial_on_single_world():
    f = And(
        implies(box_b(Atom("P", (x,))), Atom("P", (x,))),
        implies(Atom("P", (x,)), box_b(Atom("P", (x,)))))
    for e in SINGLE.domain:
        assert satisfies_via_rb(SINGLE, "w0", {x: e}, f)


def test_rb_semantics_requires_convergent_preorder():
    bad = Model(worlds=("w0", "w1"), domain=("a",),
                relation=frozenset([("w0", "w1")]))
    with pytest.raises(FrameError):
        satisfies_via_rb(bad, "w0", {}, Atom("R0", ()))


_FORMULAS = [
    parse(s) for s in [
        "[B]P(x)",
        "[B]P(x) -> P(x)",
        "[B](P(x) | ~P(x))",
        "<K>[K]P(x) <-> [B]P(x)",
        "wh[tB_MS x]P(x)",
        "wh[tB_MS_FS x]P(x)",
        "wh[K_MS x]P(x)",
        "wh[K_MS_FS x]P(x)",
        "[B]wh[K_MS_FS x]P(x)",
        "~[B]~wh[tB_MS x][B]P(x)",
    ]
]


def test_rb_route_agrees_with_expansion_on_enumerated_models():
    checked = 0
    for m in enumerate_models(2, 2, {"P": 1}, FrameClass.S42_STRONG):
        for f in _FORMULAS:
            for w in m.worlds:
                for e in m.domain:
                    sigma = {x: e}
                    assert satisfies(m, w, sigma, f) == \
                        satisfies_via_rb(m, w, sigma, f)
                    checked += 1
    assert checked >= 1000


def test_increasing_domain_binder_uses_evaluation_world():
    m = load_model(
        "worlds: w0 w1\n"
        "domain: a b\n"
        "domain@w0: a\n"
        "domain@w1: a b\n"
        "rel: w0->w0 w0->w1 w1->w1\n"
        "pred P@w1: b\n"
    )
    f = Wh(WhTag.K_MS, x, Atom("P", (x,)))
    # b witnesses [K]P at w1 but is not available to the binder at w0.
    assert satisfies(m, "w1", {}, f)
    assert not satisfies(m, "w0", {}, f)
    assert satisfies(m, "w0", {}, dia_k(f))


def test_increasing_domain_out_of_world_assignment_rejected():
    m = load_model(
        "worlds: w0 w1\n"
        "domain: a b\n"
        "domain@w0: a\n"
        "domain@w1: a b\n"
        "rel: w0->w0 w0->w1 w1->w1\n"
    )
    with pytest.raises(EvalError):
        satisfies(m, "w0", {x: "b"}, Atom("P", (x,)))


def test_trace_steps_replay():
    f = parse("wh[K_MS_FS x]S(x)")
    verdict, steps = satisfies_trace(NEWSTOPIA, "w0", {}, f)
    assert verdict is False
    assert steps
    for step in steps:
        assert satisfies(NEWSTOPIA, step.world, step.assignment, step.formula) \
            == step.verdict


@st.composite
def _model_and_formula(draw):
    models = list(enumerate_models(2, 2, {"P": 1}, FrameClass.S42_STRONG))
    m = draw(st.sampled_from(models))
    f = draw(st.sampled_from(_FORMULAS))
    w = draw(st.sampled_from(m.worlds))
    e = draw(st.sampled_from(m.domain))
    return m, f, w, {x: e}


@given(_model_and_formula())
def test_negation_coherence(case):
    m, f, w, sigma = case
    assert satisfies(m, w, sigma, Not(f)) == (not satisfies(m, w, sigma, f))
