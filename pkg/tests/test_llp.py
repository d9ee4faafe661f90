import pytest
from hypothesis import given

from focal.gen import LLP_GAMMA0
from focal.llp import (
    llp_contract, llp_equal, llp_normalize, llp_root_rule, llp_typecheck, llp_well_typed,
)
from focal.parser import parse, parse_formula as pf
from focal.reduction import NORMAL
from focal.terms import alpha_eq
from focal.typing import TypeCheckError

from strategies import llp_command


def L(s, kind="command"):
    return parse(s, "llp", kind)


def test_negation_step():
    c = L("<(~mu y.<k|down(y)>)^ | down(x)>")
    assert llp_root_rule(c) == "logical-not"
    assert llp_contract(c) == L("<x | ~mu y.<k|down(y)>>")


def test_binder_step():
    c = L("<x | ~mu y.<k|down(y)>>")
    assert llp_root_rule(c) == "control-mu-tilde"
    assert llp_contract(c) == L("<k|down(x)>")


def test_sum_step():
    c = L("<inl(x) | ~mu[inl(x1).<k|down(x1)> | inr(x2).<h|down(x2)>]>")
    assert llp_contract(c) == L("<k|down(x)>")


def test_right_sequent_is_empty():
    env = {"x": pf("X"), "k": pf("~X")}
    llp_typecheck(L("<k|down(x)>"), env)
    with pytest.raises(TypeCheckError):
        llp_typecheck(L("x", "value"), env, "expr")


def test_ill_typed_rejected():
    assert not llp_well_typed(L("<k|down(x)>"), {"x": pf("Y"), "k": pf("~X")})


@given(llp_command())
def test_generated_llp_commands_typecheck_and_normalise(c):
    llp_typecheck(c, LLP_GAMMA0)
    r = llp_normalize(c)
    assert r.status == NORMAL
    llp_typecheck(r.term, LLP_GAMMA0)


@given(llp_command())
def test_llp_equality_is_reflexive_and_includes_reduction(c):
    assert llp_equal(c, c)
    assert llp_equal(c, llp_normalize(c).term)


def test_normal_form_of_redex_chain():
    r = llp_normalize(L("<(~mu y.<k|down(y)>)^ | down(x)>"))
    assert [s.rule for s in r.trace] == ["logical-not", "control-mu-tilde"]
    assert alpha_eq(r.term, L("<k|down(x)>"))
