"""Acceptance criteria 1-12, one PASS/FAIL line each.

Run directly (``python3 tests/test_acceptance.py``) or under pytest; in the
latter case the lines are repeated in the terminal summary.
"""
import time

from focal.corpus import EXAMPLES, MUTANTS, lambda_corpus, typed_corpus
from focal.gen import DELTA0, GAMMA0, lfoc_commands
from focal.lam import eta_contract, nj_normalize
from focal.lk import lafont_demo
from focal.lkq import eta_normalize
from focal.parser import parse, parse_copattern
from focal.printer import show
from focal.props import bijection_run, lkt_simulation, property_run
from focal.reduction import LOOP, NORMAL, classify_normal, normalize, normalize_wn
from focal.synth import bijection_check, focalize_strong, leaf_map, typecheck_synth
from focal.terms import CoVar, alpha_eq
from focal.translate import (
    cbv_to_lkq, check_factorization, cps_simulation, cps_typing_square, factorization, lkq_to_llp,
)
from focal.typing import TypeCheckError, infer

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[n])
    assert ok, RESULTS[n]


def _accepts(e) -> bool:
    try:
        infer(e.term, e.kind, e.gamma, e.delta, "lkq", e.formula)
        return True
    except TypeCheckError:
        return False


def test_criterion_01_typing_examples():
    shown = ["pair-neg-value", "excluded-middle", "swap-context"]
    t0 = time.perf_counter()
    accepted = all(_accepts(EXAMPLES[n]) for n in shown)
    rejected = not any(_accepts(m) for m in MUTANTS.values())
    dt = time.perf_counter() - t0
    record(1, accepted and rejected and dt < 1.0,
           f"3 accepted, {len(MUTANTS)} mutants rejected in {dt:.3f}s")


def test_criterion_02_iso_roundtrip():
    r = normalize(EXAMPLES["iso-roundtrip"].term)
    final = eta_normalize(r.term)
    ok = r.status == NORMAL and r.steps <= 50 and alpha_eq(final, parse("<val x|a>"))
    record(2, ok, f"{r.steps} steps, then eta gives {show(final)}")


def test_criterion_03_lafont():
    e = EXAMPLES["lafont"]
    c1, c2 = parse("<x0|a0>", "lk"), parse("<y0|b0>", "lk")
    _, n1, n2 = lafont_demo(c1, c2, e.gamma, e.delta)
    ok = alpha_eq(n1, c1) and alpha_eq(n2, c2) and not alpha_eq(n1, n2)
    record(3, ok, f"normal forms {show(n1, 'lk')} and {show(n2, 'lk')}")


def test_criterion_04_confluence():
    t0 = time.perf_counter()
    rep = property_run("confluence", 500, seed=0, depth=7)
    dt = time.perf_counter() - t0
    record(4, rep.ok and dt <= 60, f"500 commands, {len(rep.failures)} failures, {dt:.1f}s")


def test_criterion_05_weak_normalisation():
    bad = []
    for i, c in enumerate(lfoc_commands(1, 500, 7)):
        nf, _ = normalize_wn(c, GAMMA0, DELTA0)
        if classify_normal(nf) == "NotNormal":
            bad.append(i)
    record(5, not bad, f"500 commands normalised by degree, {len(bad)} not normal")


def test_criterion_06_self_application():
    enc = cbv_to_lkq(lambda_corpus()["delta-delta"])
    shown = parse("mu g." + EXAMPLES["deltadelta"].text, "lfoc", "expr")
    r = normalize(enc.body, fuel=200)
    ok = alpha_eq(enc, shown) and r.status == LOOP
    record(6, ok, f"encoding matches display, {r.status} from step {r.loop_from}")


def test_criterion_07_cps():
    corpus = typed_corpus(30)
    untyped = [e.name for e in corpus
               if not cps_typing_square(e.term, e.gamma, e.delta, e.kind, e.formula)]
    unsimulated = [e.name for e in corpus if e.kind == "command" and cps_simulation(e.term)]
    record(7, not untyped and not unsimulated,
           f"{len(corpus)} terms, typing failures {untyped}, simulation failures {unsimulated}")


def test_criterion_08_factorisation():
    corpus = typed_corpus(30)
    bad = [e.name for e in corpus if not check_factorization(e.term)]
    f = factorization(CoVar("a"))
    chain = [show(f.factored, "nj"), show(nj_normalize(f.factored), "nj"),
             show(eta_contract(nj_normalize(f.factored)), "nj")]
    ok = (not bad and f.holds and f.report.beta_needed
          and chain == [r"\x.(\k.k x) k_a", r"\x.k_a x", "k_a"] and show(f.direct, "nj") == "k_a")
    record(8, ok, f"{len(corpus)} terms, failures {bad}, covariable chain {' = '.join(chain)}")


def test_criterion_09_llp_retraction():
    rep = property_run("retraction", 200, seed=0)
    got = lkq_to_llp(EXAMPLES["double-negation"].term, optimize=True)
    want = parse("down((~mu x.<k_a|down(x)>)^)", "llp", "context")
    ok = rep.ok and alpha_eq(got, want)
    record(9, ok, f"200 LLP commands, {len(rep.failures)} failures, ~~P gives {show(got, 'llp')}")


def test_criterion_10_bijection():
    rep = bijection_run(200, seed=0, exhaustive_size=7, max_size=9)
    q = parse_copattern("(x,[y,a^])")
    C = parse("[<val y|b> | y, a^ | <val x|d>]", "inter")
    rows = [(show(c, "inter")) for _, c in leaf_map(C, q)]
    exact = rows == ["< val y | b >", "< val x | d >"] and bijection_check(C, q)
    record(10, rep.ok and exact,
           f"{rep.samples} trees up to size 9, {len(rep.failures)} failures, example map {rows}")


def test_criterion_11_focalisation():
    bad = []
    for i, c in enumerate(lfoc_commands(2, 100, 7)):
        try:
            r = focalize_strong(c, GAMMA0, DELTA0, check_measure=True)
            typecheck_synth(r.term, GAMMA0, DELTA0, r.kind, r.formula)
        except (TypeCheckError, AssertionError) as exc:
            bad.append((i, str(exc)))
    record(11, not bad, f"100 commands focalised and retyped, {len(bad)} failures")


def test_criterion_12_lambda_programs():
    progs = lambda_corpus()
    bad = [name for name, M in progs.items() if lkt_simulation(M)]
    record(12, len(progs) == 15 and not bad,
           f"{len(progs)} programs, failures {bad}")


if __name__ == "__main__":
    import sys
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except Exception as exc:
                failed += 1
                if not isinstance(exc, AssertionError):
                    print(f"{name}: {type(exc).__name__}: {exc}")
    sys.exit(1 if failed else 0)
