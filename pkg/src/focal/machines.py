"""Substitution-based abstract machines.

* call-by-name (Krivine) with the control operator and reified stacks,
* call-by-value with ``M o e`` (argument pending) and ``V . e`` frames,
* the value-passing sequent calculus with contexts ``a | V :: e | ~mu x.c``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable

from .printer import show
from .reduction import FUEL, LOOP, NORMAL, Result, TraceStep
from .terms import (
    App, Cmd, Control, CoVar, Dot, Lam, Mu, MuT, Node, Reified, Val, Var, alpha_eq, canon,
    fv, subst,
)


@dataclass(frozen=True)
class CbnState:
    term: Node
    stack: tuple = ()

    def __str__(self) -> str:
        return f"< {show(self.term, 'lam')} | {_cbn_stack(self.stack)} >"

    def key(self):
        return (canon(self.term), tuple(canon(m) for m in self.stack))


def _cbn_stack(stack) -> str:
    return "".join(f"{show(m, 'lam')} . " for m in stack) + "[]"


@dataclass(frozen=True)
class Frame:
    """``arg``: M o e (M still to evaluate); ``val``: V . e (V an argument value)."""
    kind: str
    term: Node


@dataclass(frozen=True)
class CbvState:
    term: Node
    stack: tuple = ()

    def __str__(self) -> str:
        parts = [f"{show(f.term, 'lam')} {'o' if f.kind == 'arg' else '.'} " for f in self.stack]
        return f"< {show(self.term, 'lam')} | {''.join(parts)}[] >"

    def key(self):
        return (canon(self.term), tuple((f.kind, canon(f.term)) for f in self.stack))


def is_lambda_value(t: Node) -> bool:
    """A value is a variable or an abstraction."""
    return isinstance(t, (Var, Lam))


# ---------------------------------------------------------------- call-by-name

def cbn_rule(s: CbnState) -> str | None:
    match s.term, s.stack:
        case App(), _:
            return "push"
        case Lam(), (_, *_):
            return "beta"
        case Control(), _:
            return "capture"
        case Reified(), (_, *_):
            return "restore"
    return None


def cbn_step(s: CbnState) -> CbnState | None:
    """One transition, or None for final and stuck states."""
    t, E = s.term, s.stack
    match t:
        case App(m, n):
            return CbnState(m, (n,) + E)
        case Lam(x, body) if E:
            return CbnState(subst(body, {("v", x): E[0]}), E[1:])
        case Control(m):
            return CbnState(m, (Reified(E),))
        case Reified(saved) if E:
            return CbnState(E[0], tuple(saved))
    return None


def cbn_final(s: CbnState) -> bool:
    """Abstraction on the empty stack, or a free variable in head position."""
    return (isinstance(s.term, Lam) and not s.stack) or isinstance(s.term, Var)


def check_closed_cbn(M: Node) -> None:
    if fv(M):
        names = ", ".join(sorted(n for _, n in fv(M)))
        raise ValueError(f"the program is not closed (free: {names})")


# ---------------------------------------------------------------- call-by-value

def cbv_rule(s: CbvState) -> str | None:
    t, e = s.term, s.stack
    if isinstance(t, App):
        return "push-arg"
    if e and is_lambda_value(t) and e[0].kind == "arg":
        return "swap"
    if e and isinstance(t, Lam) and e[0].kind == "val":
        return "beta"
    return None


def cbv_step(s: CbvState) -> CbvState | None:
    t, e = s.term, s.stack
    rule = cbv_rule(s)
    if rule == "push-arg":
        return CbvState(t.arg, (Frame("arg", t.fun),) + e)
    if rule == "swap":
        return CbvState(e[0].term, (Frame("val", t),) + e[1:])
    if rule == "beta":
        return CbvState(subst(t.body, {("v", t.name): e[0].term}), e[1:])
    return None


def cbv_final(s: CbvState) -> bool:
    return is_lambda_value(s.term) and not s.stack


# ---------------------------------------------------------------- value-passing sequent calculus

def lbar_rule(c: Node) -> str | None:
    match c:
        case Cmd(Val(Lam()), Dot()):
            return "beta-value"
        case Cmd(Mu(), _):
            return "mu"
        case Cmd(Val(_), MuT()):
            return "mu-tilde"
    return None


def lbar_step(c: Node) -> Node | None:
    match c:
        case Cmd(Val(Lam(x, m)), Dot(v, e)):
            return Cmd(subst(m, {("v", x): v}), e)
        case Cmd(Mu(a, body), e):
            return subst(body, {("c", a): e})
        case Cmd(Val(v), MuT(x, body)):
            return subst(body, {("v", x): v})
    return None


# ---------------------------------------------------------------- driver

_MACHINES: dict[str, tuple[Callable, Callable, Callable]] = {
    "cbn": (cbn_step, cbn_rule, lambda s: s.key()),
    "cbv": (cbv_step, cbv_rule, lambda s: s.key()),
    "lbarq": (lbar_step, lbar_rule, canon),
}


def load(machine: str, program: Node):
    """Initial state for a program: a lambda-term on the empty stack, or an lbar command."""
    if machine == "cbn":
        return CbnState(program)
    if machine == "cbv":
        return CbvState(program)
    if machine == "lbarq":
        return program
    raise ValueError(f"unknown machine {machine!r}")


def run_machine(state, machine: str, fuel: int = 10000, window: int = 64) -> Result:
    """Iterate transitions; status Normal (halted), FuelExhausted or LoopDetected.

    ``Result.term`` holds the last state; trace entries carry whole states.
    """
    stepper, namer, key = _MACHINES[machine]
    trace: list[TraceStep] = []
    hist: deque = deque(maxlen=window)
    seen: dict = {}
    k = key(state)
    hist.append(k)
    seen[k] = 0
    for i in range(fuel):
        nxt = stepper(state)
        if nxt is None:
            return Result(state, trace, NORMAL)
        trace.append(TraceStep(namer(state), (), state, nxt))
        state = nxt
        k = key(state)
        if k in seen and k in hist:
            return Result(state, trace, LOOP, seen[k])
        if len(hist) == hist.maxlen:
            seen.pop(hist[0], None)
        hist.append(k)
        seen[k] = i + 1
    return Result(state, trace, FUEL)


def show_state(state, machine: str) -> str:
    return show(state, "lbar") if machine == "lbarq" else str(state)


# ---------------------------------------------------------------- coherence with the encodings

def cbv_agrees_with_encoding(M: Node, fuel: int = 2000) -> tuple[bool, str, str]:
    """Run M on the call-by-value machine and its encoding under reduction.

    Returns (agree, machine status, encoding status).  When both halt and
    the machine ends on a variable, the encoding must end on that variable.
    """
    from .reduction import normalize
    from .translate import cbv_to_lkq
    from .terms import fresh, all_names
    top = fresh("tp", all_names(M))
    m = run_machine(CbvState(M), "cbv", fuel)
    r = normalize(Cmd(cbv_to_lkq(M), CoVar(top)), fuel=fuel)
    agree = (m.status == NORMAL) == (r.status == NORMAL)
    if agree and m.status == NORMAL and isinstance(m.term.term, Var) and cbv_final(m.term):
        agree = alpha_eq(r.term, Cmd(Val(m.term.term), CoVar(top)))
    if agree and m.status == NORMAL and not cbv_final(m.term):
        agree = False  # the machine got stuck
    return agree, m.status, r.status


def cbn_state_to_lkt(s: CbnState, top: str = "tp") -> Node:
    from .translate import cbn_stack, cbn_to_lkt
    return Cmd(cbn_to_lkt(s.term), Val(cbn_stack([cbn_to_lkt(m) for m in s.stack], CoVar(top))))


def cbn_simulated_by_lkt(M: Node, fuel: int = 200) -> bool:
    """Every CBN machine step is matched by one or two root steps of the LKT image."""
    from .lkq import mirror
    from .reduction import step
    from .terms import fresh, all_names
    top = fresh("tp", all_names(M))
    r = run_machine(CbnState(M), "cbn", fuel)
    for st in r.trace:
        cur = mirror(cbn_state_to_lkt(st.before, top))
        goal = mirror(cbn_state_to_lkt(st.after, top))
        ok = False
        for _ in range(2):
            try:
                cur = step(cur, "position:")[0]
            except ValueError:
                break
            if alpha_eq(cur, goal):
                ok = True
                break
        if not ok:
            return False
    return True
