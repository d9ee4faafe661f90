import pytest
from hypothesis import given, settings

from focal import formula as F
from focal.corpus import EXAMPLES, LAMBDA_PROGRAMS, TYPED_LAMBDA, typed_corpus
from focal.gen import DELTA0, GAMMA0, LLP_GAMMA0
from focal.lam import eta_contract, lam_typecheck, nj_normalize
from focal.llp import llp_typecheck
from focal.parser import parse
from focal.terms import App, CoVar, Var, alpha_eq
from focal.translate import (
    KNames, cbv_formula, cbv_to_lkq, check_factorization, cps_simulation, cps_typing_square,
    factorization, lk_to_lkq, lkq_to_llp, lkq_to_nj, llp_env, llp_to_lkq, llp_to_nj,
    nonreflection_demo, retraction_holds,
)
from focal.typing import infer

from strategies import lfoc_command, llp_command


def Q(s, kind="command"):
    return parse(s, "lfoc", kind)


def LL(s, kind="command"):
    return parse(s, "llp", kind)


def N(s):
    return parse(s, "nj", "term")


# ---------------------------------------------------------------- LK -> LKQ

def test_lk_injection_of_activation():
    got = lk_to_lkq(parse("inl(mu a1.<x|a1>)", "lk", "expr"))
    assert alpha_eq(got, Q("mu a.< mu a1.<val x|a1> | ~mu x1.<val inl(x1)|a> >", "expr"))


def test_lk_pair_binds_second_component_first():
    got = lk_to_lkq(parse("(mu a1.<x|a1>, mu a2.<y|a2>)", "lk", "expr"))
    want = Q("mu a.< mu a2.<val y|a2> | ~mu x2.< mu a1.<val x|a1> | ~mu x1.<val (x1,x2)|a> > >", "expr")
    assert alpha_eq(got, want)


def test_lk_variable_is_a_value():
    assert lk_to_lkq(parse("x", "lk", "expr")) == Q("val x", "expr")


# ---------------------------------------------------------------- call-by-value

def test_cbv_self_application_matches_display():
    enc = cbv_to_lkq(parse(LAMBDA_PROGRAMS["delta-delta"], "lam", "term"))
    assert alpha_eq(enc, Q("mu g." + EXAMPLES["deltadelta"].text, "expr"))


def test_cbv_identity():
    assert alpha_eq(cbv_to_lkq(parse(r"\x.x", "lam", "term")),
                    Q("val ((~mu (x,a^).<val x|a>)^)", "expr"))


@pytest.mark.parametrize("name", TYPED_LAMBDA)
def test_cbv_encoding_typechecks_at_translated_type(name):
    M = parse(LAMBDA_PROGRAMS[name], "lam", "term")
    A = F.ground(lam_typecheck(M))
    infer(cbv_to_lkq(M), "expr", {}, {}, "lkq", cbv_formula(A))


# ---------------------------------------------------------------- CPS

def test_cps_command_is_application():
    assert isinstance(lkq_to_nj(Q("<mu b.<val x|b> | a>")), App)


def test_cps_value_expression():
    assert alpha_eq(lkq_to_nj(Q("val x", "expr")), N(r"\k.k x"))


def test_cps_covariable():
    assert lkq_to_nj(CoVar("a")) == Var("k_a")


def test_knames_avoid_collisions():
    kn = KNames(Q("<val k_a|a>"))
    assert kn("a") != "k_a"
    assert kn("a") == kn("a")


@pytest.mark.parametrize("entry", typed_corpus(), ids=lambda e: e.name)
def test_cps_typing_square_on_corpus(entry):
    assert cps_typing_square(entry.term, entry.gamma, entry.delta, entry.kind, entry.formula)


@pytest.mark.parametrize("entry", [e for e in typed_corpus() if e.kind == "command"],
                         ids=lambda e: e.name)
def test_cps_simulates_each_step(entry):
    assert cps_simulation(entry.term) == []


# ---------------------------------------------------------------- LLP

def test_double_negation_display():
    t = EXAMPLES["double-negation"].term
    got = lkq_to_llp(t, optimize=True)
    assert alpha_eq(got, LL("down((~mu x.<k_a|down(x)>)^)", "context"))
    llp_typecheck(got, {"k_a": F.NotP(F.Atom("P"))}, "context", F.NotP(F.NotP(F.Atom("P"))))


def test_optimised_focused_cut():
    got = lkq_to_llp(Q("<val x|a>"), optimize=True)
    assert alpha_eq(got, LL("<x | ~mu y.<k_a|down(y)>>"))


def test_unoptimised_cut_swaps_sides():
    got = lkq_to_llp(Q("<val x|a>"))
    assert alpha_eq(got, LL("<(~mu y.<k_a|down(y)>)^ | down(x)>"))


def test_llp_down_reads_back_as_coval():
    assert alpha_eq(llp_to_lkq(LL("down(x)", "context")), Q("coval x", "context"))
    assert llp_to_lkq(LL("x", "value")) == Var("x")


def test_double_negation_round_trip():
    t = lkq_to_llp(EXAMPLES["double-negation"].term, optimize=True)
    assert alpha_eq(lkq_to_llp(llp_to_lkq(t), optimize=True), t)


def test_llp_to_nj_clauses():
    assert alpha_eq(llp_to_nj(LL("<x | ~mu y.<k|down(y)>>")), N(r"(\y.(\k1.k1 y) k) x"))
    assert alpha_eq(llp_to_nj(LL("down(x)", "context")), N(r"\k.k x"))


@given(llp_command())
def test_retraction(t):
    assert retraction_holds(t, optimize=True)


@settings(max_examples=25)
@given(llp_command(depth=3))
def test_retraction_unoptimised(t):
    assert retraction_holds(t, optimize=False)


@given(llp_command())
def test_llp_translation_keeps_typing(t):
    from focal.llp import llp_typecheck as chk
    chk(t, LLP_GAMMA0)
    back = llp_to_lkq(t)
    infer(back, "command", LLP_GAMMA0, {})


@given(lfoc_command(depth=3))
def test_llp_image_is_typed_in_polarised_subsystem(c):
    kn = KNames(c)
    img = lkq_to_llp(c, knames=kn)
    llp_typecheck(img, llp_env(GAMMA0, DELTA0, kn))


# ---------------------------------------------------------------- factorisation

def test_covariable_clause_needs_beta_then_eta():
    f = factorization(CoVar("a"))
    assert alpha_eq(f.factored, N(r"\x.(\k.k x) k_a"))
    assert alpha_eq(nj_normalize(f.factored), N(r"\x.k_a x"))
    assert eta_contract(nj_normalize(f.factored)) == Var("k_a")
    assert f.holds and f.report.beta_needed


def test_value_clause():
    f = factorization(Q("val x", "expr"))
    assert alpha_eq(f.direct, N(r"\k.k x"))
    assert f.holds


@pytest.mark.parametrize("name", ["pair-neg-value", "excluded-middle", "swap-context",
                                  "iso-v1", "iso-v2", "iso-c1", "iso-c2"])
def test_factorisation_on_examples(name):
    assert check_factorization(EXAMPLES[name].term)


@settings(max_examples=30)
@given(lfoc_command(depth=3))
def test_factorisation_on_generated(c):
    assert check_factorization(c)


def test_non_reflection():
    c1, c2, c3 = (parse(s, "lk") for s in ("<x0|a0>", "<y0|b0>", "<x1|a1>"))
    src, img, nf, target, reached = nonreflection_demo(c1, c2, c3)
    assert alpha_eq(nf, target)
    assert not reached


def test_mirror_translation_between_cbn_and_lkt():
    from focal.lkq import mirror
    from focal.translate import cbn_to_lkt
    t = cbn_to_lkt(parse(r"(\x.x) y", "lam", "term"))
    assert alpha_eq(mirror(mirror(t)), t)
