"""The polarised subsystem with right-empty sequents and dereliction ``down(V)``."""
from __future__ import annotations

from collections import deque
from typing import Mapping

from .formula import Formula
from .reduction import FUEL, LOOP, NORMAL, Result, Strategy, TraceStep, _chooser
from .terms import (
    Bullet, Cmd, Down, Inl, Inr, MuT, MuTP, MuTS, Node, Pair, Var, alpha_eq, canon, children,
    fv, positions, replace_at, subst, subterm_at, with_children,
)
from .typing import Derivation, TypeCheckError, infer


def llp_typecheck(t: Node, gamma: Mapping[str, Formula], kind: str = "command",
                  formula: Formula | None = None) -> Derivation:
    """Derivation of (G |-), (G |- V:P ;) or (G ; e:P |-)."""
    if kind == "expr":
        raise TypeCheckError("the polarised subsystem has no expressions")
    d, _ = infer(t, kind, gamma, {}, "llp", formula)
    return d


def llp_well_typed(t: Node, gamma, kind="command", formula=None) -> bool:
    try:
        llp_typecheck(t, gamma, kind, formula)
        return True
    except TypeCheckError:
        return False


def llp_root_rule(t: Node) -> str | None:
    match t:
        case Cmd(_, MuT()):
            return "control-mu-tilde"
        case Cmd(Pair(), MuTP()):
            return "logical-tensor"
        case Cmd(Inl(), MuTS()):
            return "logical-plus-inl"
        case Cmd(Inr(), MuTS()):
            return "logical-plus-inr"
        case Cmd(Bullet(), Down()):
            return "logical-not"
    return None


def llp_contract(t: Node) -> Node:
    rule = llp_root_rule(t)
    l, r = (t.left, t.right) if rule else (None, None)
    match rule:
        case "control-mu-tilde":
            return subst(r.body, {("v", r.name): l})
        case "logical-tensor":
            return subst(r.body, {("v", r.x1): l.left, ("v", r.x2): l.right})
        case "logical-plus-inl":
            return subst(r.c1, {("v", r.x1): l.body})
        case "logical-plus-inr":
            return subst(r.c2, {("v", r.x2): l.body})
        case "logical-not":
            return Cmd(r.body, l.body)
    raise ValueError(f"not a redex: {t}")


def llp_redexes(c: Node) -> list[tuple[tuple, str]]:
    return [(p, r) for p, s in positions(c) if (r := llp_root_rule(s))]


def llp_step(c: Node, position: tuple | None = None) -> Node | None:
    """Contract at ``position`` (default: leftmost-outermost); None if normal."""
    if position is None:
        rs = llp_redexes(c)
        if not rs:
            return None
        position = rs[0][0]
    try:
        sub = subterm_at(c, tuple(position))
    except (IndexError, AttributeError):
        raise ValueError(f"invalid position {position}") from None
    if llp_root_rule(sub) is None:
        raise ValueError(f"no redex at position {tuple(position)}")
    return replace_at(c, tuple(position), llp_contract(sub))


def llp_normalize(c: Node, fuel: int = 10000, strategy: Strategy | str = "leftmost",
                  window: int = 64) -> Result:
    strat = Strategy.parse(strategy) if isinstance(strategy, str) else strategy
    if strat.kind == "position":
        raise ValueError("a position is a single step; use llp_step")
    choose = _chooser(strat)
    trace: list[TraceStep] = []
    hist: deque = deque([canon(c)], maxlen=window)
    for _ in range(fuel):
        rs = llp_redexes(c)
        if not rs:
            return Result(c, trace, NORMAL)
        pos, rule = choose(rs)
        new = llp_step(c, pos)
        trace.append(TraceStep(rule, pos, c, new))
        c = new
        k = canon(c)
        if k in hist:
            return Result(c, trace, LOOP)
        hist.append(k)
    return Result(c, trace, FUEL)


def llp_eta_normalize(t: Node) -> Node:
    """Contract ~mu x.<x|e> to e (x not free in e), bottom-up to a fixpoint."""
    while True:
        t2 = _eta_pass(t)
        if t2 == t:
            return t
        t = t2


def _eta_pass(t: Node) -> Node:
    kids = children(t)
    if kids:
        new = [_eta_pass(k) for k in kids]
        if any(a is not b for a, b in zip(new, kids)):
            t = with_children(t, new)
    match t:
        case MuT(x, Cmd(Var(y), e)) if x == y and ("v", x) not in fv(e):
            return e
    return t


def llp_equal(t1: Node, t2: Node, fuel: int = 10000) -> bool:
    """Equality up to reduction of commands and eta (used by the retraction check)."""
    return alpha_eq(_nf(t1, fuel), _nf(t2, fuel))


def _nf(t: Node, fuel: int) -> Node:
    for _ in range(fuel):
        t2 = llp_eta_normalize(_reduce_everywhere(t, fuel))
        if t2 == t:
            return t
        t = t2
    raise RuntimeError("no stable normal form")


def _reduce_everywhere(t: Node, fuel: int) -> Node:
    for _ in range(fuel):
        rs = llp_redexes(t)
        if not rs:
            return t
        t = replace_at(t, rs[0][0], llp_contract(subterm_at(t, rs[0][0])))
    raise RuntimeError("reduction fuel exhausted")
