"""Property suites over generated instances, with counterexample shrinking."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from . import formula as F
from .gen import (
    DELTA0, GAMMA0, X, all_formulas, all_trees, copattern_for, lfoc_commands,
    llp_commands, random_formula, random_tree,
)
from .printer import show
from .reduction import NORMAL, normalize
from .terms import Cmd, CoVar, MuT, MuTB, MuTP, MuTS, Node, Val, Var, alpha_eq, fv, positions
from .typing import TypeCheckError, infer

SUITES = ("confluence", "subject-reduction", "simulation", "bijection", "retraction",
          "factorization", "mirror")


@dataclass
class Failure:
    sample: int
    message: str
    counterexample: str


@dataclass
class Report:
    suite: str
    samples: int
    seed: int
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"suite": self.suite, "samples": self.samples, "seed": self.seed,
                "failures": [vars(f) for f in self.failures]}

    def __str__(self) -> str:
        head = f"{self.suite}: {self.samples} samples, {len(self.failures)} failures (seed {self.seed})"
        return "\n".join([head] + [f"  #{f.sample}: {f.message}\n    {f.counterexample}"
                                   for f in self.failures])


def _typed(c: Node, gamma, delta) -> bool:
    try:
        infer(c, "command", gamma, delta)
        return True
    except TypeCheckError:
        return False


def shrink(c: Node, fails: Callable[[Node], bool], gamma=GAMMA0, delta=DELTA0) -> Node:
    """Smallest proper sub-command, typed in the same sequent, that still fails."""
    while True:
        smaller = sorted(
            (s for p, s in positions(c) if p and isinstance(s, Cmd)
             and all(n in gamma or n in delta for _, n in fv(s)) and _typed(s, gamma, delta)),
            key=lambda s: len(list(positions(s))))
        nxt = next((s for s in smaller if _safe(fails, s)), None)
        if nxt is None:
            return c
        c = nxt


def _safe(pred, t) -> bool:
    try:
        return pred(t)
    except Exception:
        return True


def _run(suite, samples, seed, items, check, shrinkable=True) -> Report:
    rep = Report(suite, samples, seed)
    for i, t in enumerate(items):
        try:
            msg = check(t)
        except Exception as exc:  # an exception is a failure, not a crash of the suite
            msg = f"{type(exc).__name__}: {exc}"
        if msg:
            small = shrink(t, lambda s: bool(check(s))) if shrinkable else t
            rep.failures.append(Failure(i, msg, show(small)))
    return rep


# ---------------------------------------------------------------- individual properties

def confluent_pair(c: Node, seed: int, fuel: int = 10000) -> str | None:
    """Two random strategies reach alpha-equal normal forms."""
    r1 = normalize(c, fuel=fuel, strategy=f"random:{2 * seed + 1}")
    r2 = normalize(c, fuel=fuel, strategy=f"random:{2 * seed + 2}")
    if r1.status != NORMAL or r2.status != NORMAL:
        return f"no normal form ({r1.status}, {r2.status})"
    if not alpha_eq(r1.term, r2.term):
        return f"distinct normal forms {show(r1.term)} / {show(r2.term)}"
    return None


def subject_reduction(c: Node, gamma=GAMMA0, delta=DELTA0, fuel: int = 10000) -> str | None:
    for st in normalize(c, fuel=fuel, strategy="leftmost").trace:
        try:
            infer(st.after, "command", gamma, delta)
        except TypeCheckError as exc:
            return f"step {st.rule} at {st.position} broke typing: {exc.msg}"
    return None


def phase_cycle_lint(c: Node) -> list[str]:
    """Check the alternation of focus and decomposition phases in a normal command.

    A command either focuses a value on a covariable (the right phase) or
    deactivates a variable against a binder (the left phase); each packed
    context starts a new negative phase.
    """
    issues: list[str] = []

    def command(c, path):
        match c:
            case Cmd(Val(V), CoVar()):
                value(V, path + (0, 0))
            case Cmd(Val(Var()), e) if isinstance(e, (MuTB, MuTP, MuTS)):
                context(e, path + (1,))
            case _:
                issues.append(f"command at {path} is neither a focus nor a deactivation")

    def value(V, path):
        from .terms import Bullet, Inl, Inr, Pair
        match V:
            case Pair(a, b):
                value(a, path + (0,))
                value(b, path + (1,))
            case Inl(b) | Inr(b):
                value(b, path + (0,))
            case Bullet(e):
                context(e, path + (0,))

    def context(e, path):
        match e:
            case CoVar():
                pass
            case MuT(_, b) | MuTB(_, b) | MuTP(_, _, b):
                command(b, path + (0,))
            case MuTS(_, c1, _, c2):
                command(c1, path + (0,))
                command(c2, path + (1,))

    command(c, ())
    return issues


def mirror_roundtrip(c: Node, gamma=GAMMA0, delta=DELTA0) -> str | None:
    from .lkq import Judgement, mirror, typecheck_lkt
    m = mirror(c)
    if not alpha_eq(mirror(m), c):
        return "mirror is not an involution here"
    j = Judgement("command", m, {a: F.dual_formula(f) for a, f in delta.items()},
                  {x: F.dual_formula(f) for x, f in gamma.items()})
    try:
        typecheck_lkt(j)
    except TypeCheckError as exc:
        return f"mirror image rejected: {exc.msg}"
    return None


def lkt_simulation(M) -> str | None:
    from .machines import cbn_simulated_by_lkt, cbv_agrees_with_encoding
    if not cbn_simulated_by_lkt(M):
        return "call-by-name trace not matched by LKT steps"
    agree, ms, rs = cbv_agrees_with_encoding(M)
    if not agree:
        return f"call-by-value machine {ms} but encoding {rs}"
    return None


# ---------------------------------------------------------------- suites

def property_run(suite: str, samples: int = 100, seed: int = 0, depth: int = 7) -> Report:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if suite == "confluence":
        cs = lfoc_commands(seed, samples, depth)
        # each sample gets its own pair of strategies
        seeds = {id(c): seed * samples + i for i, c in enumerate(cs)}
        return _run(suite, samples, seed, cs, lambda c: confluent_pair(c, seeds.get(id(c), seed)))
    if suite == "subject-reduction":
        return _run(suite, samples, seed, lfoc_commands(seed, samples, depth), subject_reduction)
    if suite == "mirror":
        return _run(suite, samples, seed, lfoc_commands(seed, samples, depth), mirror_roundtrip)
    if suite == "factorization":
        from .translate import factorization
        def check(c):
            return None if factorization(c).holds else "the two NJ images differ"
        return _run(suite, samples, seed, lfoc_commands(seed, samples, min(depth, 4)), check)
    if suite == "retraction":
        from .translate import retraction_holds
        def check(t):
            if not retraction_holds(t, optimize=True):
                return "optimised round trip changed the term"
            if not retraction_holds(t, optimize=False):
                return "unoptimised round trip is not equal up to reduction"
            return None
        return _run(suite, samples, seed, llp_commands(seed, samples, min(depth, 5)), check,
                    shrinkable=False)
    if suite == "simulation":
        from .corpus import lambda_corpus
        progs = list(lambda_corpus().items())
        rep = Report(suite, len(progs), seed)
        for i, (name, M) in enumerate(progs):
            msg = _safe_msg(lkt_simulation, M)
            if msg:
                rep.failures.append(Failure(i, f"{name}: {msg}", show(M, "lam")))
        return rep
    return bijection_run(samples, seed)


def _safe_msg(f, x):
    try:
        return f(x)
    except Exception as exc:
        return f"{type(exc).__name__}: {exc}"


BIJECTION_LEAF = Cmd(Val(Var("w")), CoVar("o"))


def bijection_run(samples: int = 200, seed: int = 0, exhaustive_size: int = 7,
                  max_size: int = 9) -> Report:
    """Every tree for formulas up to ``exhaustive_size``, then random trees up to ``max_size``."""
    from .synth import bijection_check
    rep = Report("bijection", 0, seed)
    gamma, delta = {"w": X}, {"o": X}

    def one(C, q, P):
        rep.samples += 1
        try:
            ok = bijection_check(C, q, gamma, delta, P)
        except Exception as exc:
            ok, why = False, f"{type(exc).__name__}: {exc}"
        else:
            why = "pattern to leaf map is not a bijection"
        if not ok:
            rep.failures.append(Failure(rep.samples - 1, f"{F.show_formula(P)}: {why}", show(C, "inter")))

    for s in range(1, exhaustive_size + 1):
        for P in all_formulas(s):
            q = copattern_for(P)
            for C in all_trees(q, BIJECTION_LEAF):
                one(C, q, P)
    rng = random.Random(seed)
    for _ in range(samples):
        P = random_formula(rng, rng.randint(exhaustive_size + 1, max_size), atoms=(X,))
        q = copattern_for(P)
        one(random_tree(rng, q, BIJECTION_LEAF), q, P)
    return rep
