import random

import pytest
from hypothesis import given, settings, strategies as st

from focal import formula as F
from focal.corpus import C2, EXAMPLES
from focal.gen import DELTA0, GAMMA0, X, all_trees, copattern_for, random_tree
from focal.parser import parse, parse_copattern as pq, parse_env, parse_formula as pf, parse_pattern as pp
from focal.patterns import orthogonal, patterns_of, show_pat
from focal.printer import show
from focal.synth import (
    MatchError, StrongFocalisationError, bijection_check, collapse, delta_pat, focalize_strong,
    gamma_pat, leaf_map, leaves, match_counterpattern, match_trace, measure, sequent_normalize,
    step_synth, synth_normalize, synth_root_rule, transcribe, typecheck_intermediate,
    typecheck_synth, xi_pat,
)
from focal.terms import MuQ, MuQC, alpha_eq
from focal.typing import TypeCheckError

from strategies import copatterns, lfoc_command

Q61 = "(x,[y,a^])"
P61 = "X * (Y + ~Q)"
TREE61 = "[<val y|b> | y, a^ | <val x|d>]"


def I(s, kind="command"):
    return parse(s, "inter", kind)


def S(s, kind="command"):
    return parse(s, "synth", kind)


# ---------------------------------------------------------------- orthogonality

def test_orthogonal_examples():
    q = pq(Q61)
    assert orthogonal(q, pp("(x,inl y)"))
    assert orthogonal(q, pp("(x,inr a^)"))
    assert not orthogonal(q, pp("(x,(y,z))"))


def test_patterns_of_examples():
    assert [show_pat(p) for p in patterns_of(pq(Q61))] == ["(x,inl(y))", "(x,inr(a^))"]
    assert [show_pat(p) for p in patterns_of(pq("x"))] == ["x"]
    assert [show_pat(p) for p in patterns_of(pq("[[x,y],z]"))] == [
        "inl(inl(x))", "inl(inr(y))", "inr(z)"]


@given(copatterns)
def test_orthogonal_iff_listed(q):
    listed = patterns_of(q)
    for p in listed:
        assert orthogonal(q, p)
    # mutate each listed pattern's first injection: it must stop being orthogonal
    # unless the flipped pattern is itself listed
    for p in listed:
        s = show_pat(p)
        flipped = s.replace("inl", "#").replace("inr", "inl").replace("#", "inr")
        fp = pp(flipped)
        assert orthogonal(q, fp) == (fp in listed)


# ---------------------------------------------------------------- matching

def test_matching_selects_each_leaf():
    C = I(TREE61)
    assert match_counterpattern(C, [(pq(Q61), pp("(x,inl y)"))]) == I("<val y|b>")
    assert match_counterpattern(C, [(pq(Q61), pp("(x,inr a^)"))]) == I("<val x|d>")


def test_matching_trace_steps():
    out = match_trace(I(TREE61), [(pq(Q61), pp("(x,inl y)"))])
    kinds = [s.split()[0] for s in out.steps]
    assert kinds == ["split", "delete", "select", "delete"]
    assert out.path == (0,)


def test_leaf_deletion_alone():
    c = I("<val x|a>")
    assert match_counterpattern(c, [(pq("x"), pp("x"))]) == c


def test_non_orthogonal_binding_rejected():
    with pytest.raises(MatchError):
        match_counterpattern(I(TREE61), [(pq(Q61), pp("(x,(y,z))"))])


def test_leaves():
    assert leaves(I("<val x|a>")) == [I("<val x|a>")]
    assert leaves(I(TREE61)) == [I("<val y|b>"), I("<val x|d>")]
    C = random_tree(random.Random(0), pq("([x,y],[z,w])"), I("<val x|a>"))
    assert len(leaves(C)) == 4


def test_bijection_on_display():
    C, q = I(TREE61), pq(Q61)
    assert [(show_pat(p), c) for p, c in leaf_map(C, q)] == [
        ("(x,inl(y))", I("<val y|b>")), ("(x,inr(a^))", I("<val x|d>"))]
    assert bijection_check(C, q)
    assert bijection_check(I("<val x|a>"), pq("x"))


@settings(max_examples=40)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=10**6))
def test_bijection_on_random_trees(size, seed):
    from focal.gen import random_formula
    rng = random.Random(seed)
    P = random_formula(rng, size, atoms=(X,))
    q = copattern_for(P)
    C = random_tree(rng, q, I("<val w|o>"))
    assert bijection_check(C, q, {"w": X}, {"o": X}, P)


def test_every_tree_of_a_small_formula_is_a_bijection():
    P = pf("(X + X) * (X + ~X)")
    q = copattern_for(P)
    trees = list(all_trees(q, I("<val w|o>")))
    assert len(trees) == 2  # one tree per order of the two sums
    assert all(bijection_check(C, q, {"w": X}, {"o": X}, P) for C in trees)


# ---------------------------------------------------------------- typing

def test_pattern_contexts():
    P = pf(P61)
    assert xi_pat(pp("(x,inl y)"), P) == {"x": pf("X"), "y": pf("Y")}
    assert xi_pat(pp("(x,inr a^)"), P) == {"x": pf("X")}
    assert delta_pat(pp("(x,inr a^)"), P) == {"a": pf("Q")}
    with pytest.raises(TypeCheckError):
        gamma_pat(pp("inl x"), pf("X * Y"))


def test_intermediate_counterpattern_rule():
    C = I(TREE61)
    typecheck_intermediate(C, {}, parse_env("b: Y, d: X"), qenv=[(pq(Q61), pf(P61))])
    A = typecheck_intermediate(MuQC(pq(Q61), C), {}, parse_env("b: Y, d: X"), "context")
    # the negated atom is unconstrained by the leaves
    assert isinstance(A, F.Tensor) and A.left == X and A.right.left == pf("Y")
    assert isinstance(A.right.right.body, F.Meta)


def test_intermediate_axiom():
    assert typecheck_intermediate(I("x", "value"), {"x": X}, {}, "value", X) == X


def test_intermediate_rejects_non_atomic_use():
    with pytest.raises(StrongFocalisationError):
        typecheck_intermediate(I("x", "value"), {"x": pf("X * Y")}, {}, "value")


def test_collapsed_record_typechecks():
    rec = collapse(MuQC(pq(Q61), I(TREE61)))
    assert isinstance(rec, MuQ) and len(rec.fields) == 2
    assert typecheck_synth(rec, {}, parse_env("b: Y, d: X"), "context", pf(P61)) == pf(P61)


def test_synth_rejects_non_atomic_hypothesis():
    with pytest.raises(StrongFocalisationError):
        typecheck_synth(S("<val x{x:=x}|a>"), {"x": pf("~X")}, {"a": pf("~X")})


def test_synth_requires_every_field():
    R = "~mu (x,[y,a^]).{ (x,inl(y)) -> <val y{y:=y} | b> }"
    with pytest.raises(TypeCheckError):
        typecheck_synth(S(R, "context"), {}, parse_env("b: Y"), "context", pf(P61))


# ---------------------------------------------------------------- reduction

R61 = "~mu (x,[y,a^]).{ (x,inl(y)) -> <val y{y:=y} | b> ; (x,inr(a^)) -> <val x{x:=x} | a> }"


def test_record_step_fills_left_field():
    c = S(f"<val (x,inl(y)){{x:=u, y:=w}} | {R61}>")
    assert synth_root_rule(c) == "mu-tilde-plus"
    assert step_synth(c) == S("<val y{y:=w} | b>")


def test_record_step_fills_right_field():
    c = S(f"<val (x,inr(a^)){{x:=u, a^:=(~mu t.{{ t -> <val t{{t:=t}}|o> }})^}} | {R61}>")
    assert alpha_eq(step_synth(c), S("<val x{x:=u} | ~mu t.{ t -> <val t{t:=t}|o> }>"))


def test_mu_step():
    c = S("<mu g.<val y{y:=y}|g> | b>")
    assert synth_root_rule(c) == "mu"
    assert step_synth(c) == S("<val y{y:=y}|b>")


def test_normal_record_command():
    assert step_synth(S("<val x{x:=y}|a>")) is None
    assert synth_normalize(S("<val x{x:=y}|a>")).steps == 0


# ---------------------------------------------------------------- sequents and focalisation

def test_sequent_negation():
    [s] = sequent_normalize(parse_env("x: ~P"), {})
    assert s.left == () and s.right == (("x", pf("P")),)


def test_sequent_sum_forks():
    out = [str(s) for s in sequent_normalize(parse_env("x: P1 + P2"), parse_env("g: X"))]
    assert out == ["x_1:P1 |- g:X", "x_2:P2 |- g:X"]


def test_atomic_sequent_is_fixed():
    assert [str(s) for s in sequent_normalize(parse_env("z: X"), parse_env("g: X"))] == ["z:X |- g:X"]


def test_sequent_rejects_negative_formula():
    with pytest.raises(ValueError):
        sequent_normalize({"x": pf("-X")}, {})


@pytest.mark.parametrize("name", ["pair-neg-value", "excluded-middle", "swap-context"])
def test_focalise_small_examples(name):
    e = EXAMPLES[name]
    r = focalize_strong(e.term, e.gamma, e.delta, e.kind, e.formula)
    atoms = {x: P for x, P in r.gamma.items() if F.is_atomic(P)}
    typecheck_synth(r.term, atoms, r.delta, r.kind, r.formula)


def test_focalise_record_for_negated_pair():
    e = EXAMPLES["iso-c2"]
    r = focalize_strong(e.term, e.gamma, e.delta)
    assert r.kind == "context" and isinstance(r.term, MuQ)
    # the hypothesis ~P1 * ~P2 becomes a pair of bullet leaves: one field
    assert len(r.term.fields) == 1
    inner = [t for t in _subterms(r.term) if isinstance(t, MuQ) and t is not r.term]
    assert any(len(m.fields) == 2 for m in inner)
    typecheck_synth(r.term, {}, r.delta, "context", r.formula)


def _subterms(t):
    from focal.terms import positions
    return [s for _, s in positions(t)]


def test_focalised_sum_hypothesis_gives_two_fields():
    c = parse("<val x | ~mu y.<val y|a>>")
    r = focalize_strong(c, parse_env("x: X + Y"), parse_env("a: X + Y"))
    assert len(r.sequents) == 2
    assert len(r.term.fields) == 2


def test_already_focused_term_is_a_fixed_point():
    c = parse("<val x | ~mu y.<val (x,y)|a>>")
    g, d = {"x": X}, {"a": pf("X * X")}
    assert alpha_eq(focalize_strong(c, g, d).term, transcribe(c))


def test_measure_counts_formula_sizes():
    g = {"x": pf("X * ~Y")}
    assert measure(parse("<val x|a>"), g, {"a": pf("X * ~Y")}) > measure(
        parse("<val z|a>"), {"z": X}, {"a": X})


@settings(max_examples=30)
@given(lfoc_command(depth=4))
def test_focalisation_typechecks(c):
    r = focalize_strong(c, GAMMA0, DELTA0)
    typecheck_synth(r.term, GAMMA0, DELTA0, r.kind, r.formula)


def test_c2_inner_record_has_two_fields():
    r = focalize_strong(parse(C2), parse_env("x: ~P1 * ~P2"), parse_env("g: ~(P1 + P2)"))
    text = show(r.term, "synth")
    assert text.startswith("~mu (x_1^,x_2^).{ (x_1^,x_2^) -> ")
    assert "~mu [y1,y2].{ inl(y1) -> < val y1{y1:=y1} | a1 > ; inr(y2) -> < val y2{y2:=y2} | a2 > }" in text
