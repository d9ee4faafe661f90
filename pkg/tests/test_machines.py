import pytest

from focal.corpus import LAMBDA_PROGRAMS, lambda_corpus
from focal.machines import (
    CbnState, CbvState, cbn_final, cbn_rule, cbn_simulated_by_lkt, cbn_step, cbv_agrees_with_encoding,
    cbv_final, cbv_rule, cbv_step, lbar_rule, lbar_step, load, run_machine,
)
from focal.parser import parse
from focal.reduction import FUEL, LOOP, NORMAL


def M(s):
    return parse(s, "lam", "term")


def states(step, s):
    out = [s]
    while (s := step(s)) is not None:
        out.append(s)
    return out


def test_cbn_identity_application():
    run = states(cbn_step, CbnState(M(r"(\x.x) y")))
    assert [str(s) for s in run] == ["< (\\x.x) y | [] >", "< \\x.x | y . [] >", "< y | [] >"]


def test_cbn_control_captures_the_stack():
    s = CbnState(M(r"control(\k.k (\z.z)) w"))
    s1 = cbn_step(s)
    assert cbn_rule(s1) == "capture"
    s2 = cbn_step(s1)
    assert str(s2) == "< \\k.k (\\z.z) | reify[w] . [] >"


def test_cbn_control_with_unused_continuation_behaves_as_body():
    r = run_machine(CbnState(M(r"control(\k.\y.y)")), "cbn")
    assert r.status == NORMAL and r.steps == 2
    assert str(r.term) == "< \\y.y | [] >"


def test_cbn_lambda_on_empty_stack_is_final():
    s = CbnState(M(r"\x.x"))
    assert cbn_step(s) is None and cbn_final(s)
    assert run_machine(s, "cbn").steps == 0


def test_cbv_identity_application():
    run = states(cbv_step, CbvState(M(r"(\x.x) y")))
    assert [str(s) for s in run] == [
        "< (\\x.x) y | [] >", "< y | \\x.x o [] >", "< \\x.x | y . [] >", "< y | [] >"]
    assert cbv_final(run[-1])


def test_cbv_value_swaps_with_pending_function():
    s = CbvState(M(r"(\x.x) y"))
    s1 = cbv_step(s)
    assert cbv_rule(s1) == "swap"


def test_cbv_variable_on_empty_stack_halts():
    assert cbv_step(CbvState(M("x"))) is None


def test_lbar_rules():
    c = parse(r"<val \x.val x | y :: a>", "lbar")
    assert lbar_rule(c) == "beta-value"
    assert lbar_step(c) == parse("<val y | a>", "lbar")
    assert lbar_step(parse("<mu b.<val y|b> | a>", "lbar")) == parse("<val y|a>", "lbar")
    assert lbar_step(parse("<val y | ~mu x.<val x|a>>", "lbar")) == parse("<val y|a>", "lbar")


def test_self_application_loops_on_both_machines():
    for machine in ("cbn", "cbv"):
        assert run_machine(load(machine, M(LAMBDA_PROGRAMS["delta-delta"])), machine).status == LOOP


def test_fuel_bound():
    r = run_machine(load("cbn", M(LAMBDA_PROGRAMS["two-plus-two"])), "cbn", fuel=3)
    assert r.status == FUEL and r.steps == 3


def test_call_by_name_discards_divergent_argument():
    assert run_machine(load("cbn", M(LAMBDA_PROGRAMS["constant-loop"])), "cbn").status == NORMAL
    assert run_machine(load("cbv", M(LAMBDA_PROGRAMS["constant-loop"])), "cbv").status == LOOP


def test_unknown_machine():
    with pytest.raises(ValueError):
        load("krivine", M("x"))


@pytest.mark.parametrize("name", sorted(LAMBDA_PROGRAMS))
def test_machines_are_deterministic(name):
    for machine in ("cbn", "cbv"):
        a = run_machine(load(machine, lambda_corpus()[name]), machine, fuel=300)
        b = run_machine(load(machine, lambda_corpus()[name]), machine, fuel=300)
        assert [s.rule for s in a.trace] == [s.rule for s in b.trace]


@pytest.mark.parametrize("name", sorted(LAMBDA_PROGRAMS))
def test_cbv_machine_agrees_with_encoding(name):
    agree, ms, rs = cbv_agrees_with_encoding(lambda_corpus()[name])
    assert agree, (ms, rs)


@pytest.mark.parametrize("name", sorted(LAMBDA_PROGRAMS))
def test_cbn_machine_matched_by_lkt(name):
    assert cbn_simulated_by_lkt(lambda_corpus()[name])
