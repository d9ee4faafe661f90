"""Raw LK with explicit substitutions: typing, rewriting and the critical pair."""
from __future__ import annotations

from collections import deque
from typing import Mapping

from .formula import Formula
from .reduction import FUEL, LOOP, NORMAL, Result, TraceStep, commute
from .terms import (
    Bullet, Cmd, CoVar, Inl, Inr, Mu, MuT, MuTB, MuTP, MuTS, Node, Pair, Sub, Var,
    canon, fv, positions, replace_at, subterm_at,
)
from .typing import Derivation, TypeCheckError, infer


def typecheck_lk(t: Node, gamma: Mapping[str, Formula], delta: Mapping[str, Formula],
                 goal: Formula | None = None, kind: str = "command") -> Derivation:
    """Derivation of ``t`` in the raw LK system (raises TypeCheckError)."""
    d, _ = infer(t, kind, gamma, delta, "lk", goal)
    return d


def well_typed_lk(t: Node, gamma, delta, goal=None, kind="command") -> bool:
    try:
        typecheck_lk(t, gamma, delta, goal, kind)
        return True
    except TypeCheckError:
        return False


def root_rules_lk(t: Node) -> list[str]:
    """Rules applicable at the root; two for the critical pair."""
    out = []
    match t:
        case Cmd(l, r):
            if isinstance(l, Mu):
                out.append("control-mu")
            if isinstance(r, MuT):
                out.append("control-mu-tilde")
            match l, r:
                case Bullet(), MuTB():
                    out.append("logical-not")
                case Pair(), MuTP():
                    out.append("logical-and")
                case Inl(), MuTS():
                    out.append("logical-or-inl")
                case Inr(), MuTS():
                    out.append("logical-or-inr")
        case Sub(body, _) if not isinstance(body, Sub):
            out.append("commutation-" + ("var" if isinstance(body, (Var, CoVar)) else type(body).__name__.lower()))
    return out


def redexes_lk(c: Node) -> list[tuple[tuple, str]]:
    return [(p, r) for p, s in positions(c) for r in root_rules_lk(s)]


def _sub(c: Node, binds) -> Node:
    return Sub(c, tuple(binds))


def contract_lk(t: Node, rule: str) -> Node:
    if rule not in root_rules_lk(t):
        raise ValueError(f"rule {rule} does not apply to {t}")
    if rule.startswith("commutation"):
        return commute(t)
    l, r = t.left, t.right
    if rule == "control-mu":
        return _sub(l.body, [("c", l.name, r)])
    if rule == "control-mu-tilde":
        return _sub(r.body, [("v", r.name, l)])
    if rule == "logical-not":
        return _sub(r.body, [("c", r.name, l.body)])
    if rule == "logical-and":
        return _sub(r.body, [("v", r.x1, l.left), ("v", r.x2, l.right)])
    if rule == "logical-or-inl":
        return _sub(r.c1, [("v", r.x1, l.body)])
    return _sub(r.c2, [("v", r.x2, l.body)])


RULE_ALIASES = {"control-left": "control-mu", "control-right": "control-mu-tilde"}


def step_lk(c: Node, choice: tuple[tuple, str] | tuple) -> Node:
    """Contract the redex ``choice`` = (position, rule); a bare position picks its only rule."""
    if choice and isinstance(choice[-1], str):
        pos, rule = tuple(choice[0]), RULE_ALIASES.get(choice[1], choice[1])
    else:
        pos, rule = tuple(choice), None
    try:
        sub = subterm_at(c, pos)
    except (IndexError, AttributeError):
        raise ValueError(f"invalid position {pos}") from None
    rules = root_rules_lk(sub)
    if not rules:
        raise ValueError(f"no redex at position {pos}")
    if rule is None:
        if len(rules) > 1:
            raise ValueError(f"position {pos} is a critical pair; name the rule ({', '.join(rules)})")
        rule = rules[0]
    return replace_at(c, pos, contract_lk(sub, rule))


def normalize_lk(c: Node, prefer: str = "control-mu", fuel: int = 10000, window: int = 64) -> Result:
    """Leftmost-outermost reduction, with rules named ``prefer`` tried first."""
    trace: list[TraceStep] = []
    hist: deque = deque(maxlen=window)
    hist.append(canon(c))
    for _ in range(fuel):
        rs = redexes_lk(c)
        if not rs:
            return Result(c, trace, NORMAL)
        pick = next((x for x in rs if x[1] == prefer), rs[0])
        new = step_lk(c, pick)
        trace.append(TraceStep(pick[1], pick[0], c, new))
        c = new
        k = canon(c)
        if k in hist:
            return Result(c, trace, LOOP)
        hist.append(k)
    return Result(c, trace, FUEL)


def lafont_demo(c1: Node, c2: Node, gamma=None, delta=None, alpha: str = "a", x: str = "x"):
    """Build < mu alpha.c1 | ~mu x.c2 > and normalise it with both priorities.

    Returns (d, nf_mu_first, nf_mu_tilde_first).
    """
    if ("c", alpha) in fv(c1):
        raise ValueError(f"{alpha} must be fresh for the first command")
    if ("v", x) in fv(c2):
        raise ValueError(f"{x} must be fresh for the second command")
    if gamma is not None or delta is not None:
        typecheck_lk(c1, gamma or {}, delta or {})
        typecheck_lk(c2, gamma or {}, delta or {})
    d = Cmd(Mu(alpha, c1), MuT(x, c2))
    r1 = normalize_lk(d, "control-mu")
    r2 = normalize_lk(d, "control-mu-tilde")
    if r1.status != NORMAL or r2.status != NORMAL:
        raise RuntimeError("the critical pair did not normalise")
    return d, r1.term, r2.term


def classify_contraction(c: Node) -> str:
    """Read-only classification of a command: contraction, deactivation or cut."""
    match c:
        case Cmd(v, CoVar(b)):
            return "contraction-right" if ("c", b) in fv(v) else "deactivation-right"
        case Cmd(Var(y), e):
            return "contraction-left" if ("v", y) in fv(e) else "deactivation-left"
        case Cmd():
            return "cut"
    raise ValueError("not a command")
