import pytest

from focal.corpus import EXAMPLES
from focal.lk import (
    classify_contraction, lafont_demo, normalize_lk, redexes_lk, step_lk, typecheck_lk,
    well_typed_lk,
)
from focal.parser import parse, parse_env, parse_formula as pf
from focal.reduction import NORMAL
from focal.terms import Sub, alpha_eq
from focal.typing import TypeCheckError


def L(s, kind="command"):
    return parse(s, "lk", kind)


def test_axiom_cut_typechecks():
    typecheck_lk(L("<x|a>"), {"x": pf("A")}, {"a": pf("A")})


def test_conjunction_right_rule():
    typecheck_lk(L("(x,y)", "expr"), {"x": pf("A"), "y": pf("B")}, {}, pf("A /\\ B"), "expr")


def test_mismatched_axiom_rejected():
    assert not well_typed_lk(L("<x|a>"), {"x": pf("A")}, {"a": pf("B")})


def test_critical_pair_has_two_root_redexes():
    rules = {r for p, r in redexes_lk(L("<mu a.<x|b> | ~mu x.<y|c>>")) if p == ()}
    assert rules == {"control-mu", "control-mu-tilde"}


def test_negation_redex():
    assert redexes_lk(L("<(~mu y.<y|b>)^ | ~mu a^.<x|a>>")) == [((), "logical-not")]


def test_normal_axiom_has_no_redex():
    assert redexes_lk(L("<x|a>")) == []


def test_control_mu_creates_explicit_substitution():
    out = step_lk(L("<mu a.<x|b> | ~mu x.<y|c>>"), ((), "control-mu"))
    assert isinstance(out, Sub)
    assert alpha_eq(out.body, L("<x|b>"))


def test_commutation_reaches_variable():
    c = step_lk(L("<mu a.<x|a> | ~mu x.<y|c>>"), ((), "control-mu"))
    c = step_lk(c, ((), "commutation-cmd"))
    c = step_lk(c, ((1,), "commutation-var"))
    assert alpha_eq(c, L("<x | ~mu x.<y|c>>"))


def test_lafont_pair_gives_both_commands():
    e = EXAMPLES["lafont"]
    c1, c2 = L("<x0|a0>"), L("<y0|b0>")
    d, n1, n2 = lafont_demo(c1, c2, e.gamma, e.delta)
    assert alpha_eq(n1, c1) and alpha_eq(n2, c2)
    assert not alpha_eq(n1, n2)
    for n in (n1, n2):
        typecheck_lk(n, e.gamma, e.delta)


def test_degenerate_pair_converges():
    c = L("<x0|a0>")
    _, n1, n2 = lafont_demo(c, c)
    assert alpha_eq(n1, n2)


def test_lafont_requires_fresh_binders():
    with pytest.raises(ValueError):
        lafont_demo(L("<x0|a>"), L("<y0|b0>"))


def test_ill_typed_lafont_input_rejected():
    with pytest.raises(TypeCheckError):
        lafont_demo(L("<x0|b0>"), L("<y0|b0>"), parse_env("x0: X, y0: Y"), parse_env("a0: X, b0: Y"))


def test_normalize_priorities():
    d = L("<mu a.<x0|a0> | ~mu x.<y0|b0>>")
    assert normalize_lk(d, "control-mu").status == NORMAL
    assert alpha_eq(normalize_lk(d, "control-mu-tilde").term, L("<y0|b0>"))


def test_contraction_classifier():
    assert classify_contraction(L("<(x, a^)|a>")) == "contraction-right"
    assert classify_contraction(L("<x|a>")) == "deactivation-right"
