import json

import pytest
from hypothesis import given

from focal.corpus import EXAMPLES
from focal.gen import DELTA0, GAMMA0
from focal.lkq import check_eta, eta_normalize
from focal.parser import parse
from focal.reduction import (
    FUEL, LOOP, NORMAL, NOT_NORMAL, _augmented_hook, classify_normal, multiset_less, normalize,
    normalize_wn, redexes, replay, step,
)
from focal.terms import alpha_eq, subst
from focal.typing import infer

from strategies import lfoc_command


def C(s):
    return parse(s)


def test_logical_negation_step():
    c = C("<val (~mu y.<val y|b>)^ | ~mu a^.<val x|a>>")
    new, st = step(c)
    assert st.rule == "logical-not"
    assert alpha_eq(new, C("<val x | ~mu y.<val y|b>>"))


def test_control_steps():
    assert step(C("<mu b.<val x|b> | a>"))[1].rule == "control-mu"
    new, st = step(C("<val x | ~mu y.<val y|a>>"))
    assert st.rule == "control-mu-tilde" and new == C("<val x|a>")


def test_normal_command_has_no_step():
    assert step(C("<val x|a>")) is None
    r = normalize(C("<val x|a>"))
    assert r.status == NORMAL and r.trace == []


def test_roundtrip_example_reduces_to_axiom_modulo_eta():
    r = normalize(EXAMPLES["iso-roundtrip"].term)
    assert r.status == NORMAL
    assert r.steps == 5
    assert alpha_eq(eta_normalize(r.term), C("<val x|a>"))


def test_two_eta_lines_of_the_roundtrip():
    # each "=" collapses a (mu u.<val inj u|a_i>)-shaped pair component
    r = normalize(EXAMPLES["iso-roundtrip"].term)
    assert not alpha_eq(r.term, C("<val x|a>"))
    assert check_eta(r.term, C("<val x|a>"))


def test_self_application_loops_back_to_start():
    r = normalize(EXAMPLES["deltadelta"].term, fuel=200)
    assert r.status == LOOP
    assert r.loop_from == 0
    assert alpha_eq(r.term, EXAMPLES["deltadelta"].term)


def test_fuel_exhaustion_is_reported():
    r = normalize(EXAMPLES["deltadelta"].term, fuel=2)
    assert r.status == FUEL and r.steps == 2


def test_unbundled_mode_shows_substitution_steps():
    c = C("<val (x,y) | ~mu (u,v).<val (v,u)|a>>")
    bundled = normalize(c)
    unbundled = normalize(c, bundled=False)
    assert alpha_eq(bundled.term, unbundled.term)
    assert unbundled.steps > bundled.steps
    assert [s.rule for s in unbundled.trace] == [
        "logical-tensor", "commutation-cmd", "commutation-val", "commutation-pair",
        "commutation-var", "commutation-var"]


def test_position_strategy():
    c = C("<mu b.<val x|b> | ~mu y.<val y|a>>")
    _, st = step(c, "position:")
    assert st.position == () and st.rule == "control-mu"
    with pytest.raises(ValueError):
        step(c, "position:0.0")


def test_trace_json_replays():
    c = EXAMPLES["iso-roundtrip"].term
    r = normalize(c)
    doc = json.loads(json.dumps([s.to_json() for s in r.trace]))
    assert alpha_eq(replay(c, doc), r.term)


def test_replay_detects_mismatch():
    c = EXAMPLES["iso-roundtrip"].term
    doc = [s.to_json() for s in normalize(c).trace]
    doc[0]["rule"] = "logical-plus-inl"
    with pytest.raises(ValueError):
        replay(c, doc)


def test_augmented_substitution_fires_on_packaged_binder():
    c = C("<val x | ~mu a^.<val x|a>>")
    e = parse("~mu z.<val z|b>", "lfoc", "context")
    from focal.terms import Bullet
    out = subst(c, {("v", "x"): Bullet(e)}, _augmented_hook)
    assert alpha_eq(out, C("<val (~mu z.<val z|b>)^ | ~mu z.<val z|b>>"))


def test_classify_normal_shapes():
    assert classify_normal(C("<val (x,y)|a>")) == "val-covar"
    assert classify_normal(C("<val x | ~mu (x1,x2).<val x1|b>>")) == "tensor-left"
    assert classify_normal(C("<mu a.<val x|a> | b>")) == NOT_NORMAL


def test_multiset_order():
    assert multiset_less([2, 2, 1], [3])
    assert not multiset_less([3], [3])
    assert not multiset_less([4], [3, 3])


@given(lfoc_command())
def test_subject_reduction(c):
    for st in normalize(c, strategy="random:1").trace:
        infer(st.after, "command", GAMMA0, DELTA0)


@given(lfoc_command())
def test_weak_normalisation_agrees_with_normalize(c):
    nf, steps = normalize_wn(c, GAMMA0, DELTA0)
    assert classify_normal(nf) != NOT_NORMAL
    assert alpha_eq(nf, normalize(c).term)
    for s in steps[1:]:
        if s.measure_before:
            assert multiset_less(s.measure_after, s.measure_before)


@given(lfoc_command())
def test_two_strategies_agree(c):
    a = normalize(c, strategy="leftmost")
    b = normalize(c, strategy="rightmost")
    assert a.status == b.status == NORMAL
    assert alpha_eq(a.term, b.term)


@given(lfoc_command())
def test_normal_forms_have_no_redex(c):
    nf = normalize(c).term
    assert redexes(nf) == []
    assert classify_normal(nf) != NOT_NORMAL
