"""Lambda-calculi: the NJ target of the CPS translations and the lambda-mu sources.

NJ commands are applications ``V V`` of type R; a function type ``R^A`` is
represented by the positive negation ``NotP(A)`` so that the formula
unifier can be reused unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from . import formula as F
from .formula import Formula, Unifier, UnifyError
from .terms import (
    App, Inl, Inr, Lam, LamCase, LamP, Mu, Named, Node, Pair, Var, alpha_eq, children, fv,
    positions, replace_at, subst, with_children,
)
from .typing import TypeCheckError

RESULT = F.Atom("R")


class FuelExhausted(RuntimeError):
    """Normalisation ran out of fuel; distinct from a negative answer."""


# ---------------------------------------------------------------- beta

def nj_contract(t: Node) -> Node | None:
    """Contract ``t`` if it is a beta-redex (function, pair or case)."""
    match t:
        case App(Lam(x, body), a):
            return subst(body, {("v", x): a})
        case App(LamP(x1, x2, body), Pair(a1, a2)):
            return subst(body, {("v", x1): a1, ("v", x2): a2})
        case App(LamCase(_, x1, c1, _, _), Inl(a)):
            return subst(c1, {("v", x1): a})
        case App(LamCase(_, _, _, x2, c2), Inr(a)):
            return subst(c2, {("v", x2): a})
    return None


def nj_step(t: Node) -> Node | None:
    """One leftmost-outermost beta step, or None when ``t`` is normal."""
    for p, s in positions(t):
        r = nj_contract(s)
        if r is not None:
            return replace_at(t, p, r)
    return None


def nj_normalize(t: Node, fuel: int = 10000) -> Node:
    for _ in range(fuel):
        nxt = nj_step(t)
        if nxt is None:
            return t
        t = nxt
    if nj_step(t) is None:
        return t
    raise FuelExhausted(f"no beta-normal form within {fuel} steps")


def nj_reduces_to(t: Node, target: Node, fuel: int = 10000) -> bool:
    """Does ``t`` reach ``target`` (up to alpha) along its leftmost-outermost path?"""
    for _ in range(fuel + 1):
        if alpha_eq(t, target):
            return True
        t = nj_step(t)
        if t is None:
            return False
    raise FuelExhausted(f"target not reached within {fuel} steps")


# ---------------------------------------------------------------- eta

def _eta_here(t: Node) -> Node | None:
    match t:
        case Lam(x, App(f, Var(y))) if x == y and ("v", x) not in fv(f):
            return f
    return None


def eta_contract(t: Node) -> Node:
    """Function eta-contraction, bottom-up, to a fixpoint."""
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
    r = _eta_here(t)
    return r if r is not None else t


@dataclass(frozen=True)
class EqReport:
    equal: bool
    beta_needed: bool  # False when eta alone already identifies the two sides


def betaeta_report(t1: Node, t2: Node, fuel: int = 10000) -> EqReport:
    if alpha_eq(eta_contract(t1), eta_contract(t2)):
        return EqReport(True, False)
    n1 = eta_contract(_beta_eta_nf(t1, fuel))
    n2 = eta_contract(_beta_eta_nf(t2, fuel))
    return EqReport(alpha_eq(n1, n2), True)


def _beta_eta_nf(t: Node, fuel: int) -> Node:
    # eta on a beta-normal term can expose a new redex once sums and
    # products are involved, so alternate until both are stable
    for _ in range(fuel):
        n = eta_contract(nj_normalize(t, fuel))
        if n == t:
            return n
        t = n
    raise FuelExhausted("beta-eta alternation did not stabilise")


def betaeta_equal(t1: Node, t2: Node, fuel: int = 10000) -> bool:
    """Sound, incomplete beta-eta equality (no eta for sums)."""
    return betaeta_report(t1, t2, fuel).equal


# ---------------------------------------------------------------- NJ typing

def show_nj_type(f: Formula, result: str = "R") -> str:
    """Render NotP(A) as R^A, products with '*', sums with '+'."""
    match f:
        case F.NotP(b):
            inner = show_nj_type(b, result)
            return f"{result}^{inner}" if isinstance(b, (F.Atom, F.Meta, F.NotP)) else f"{result}^({inner})"
        case F.Tensor(a, b) | F.Plus(a, b):
            op = "*" if isinstance(f, F.Tensor) else "+"
            return f"{_par(a, result)} {op} {_par(b, result)}"
    return F.show_formula(f)


def _par(f, result):
    s = show_nj_type(f, result)
    return f"({s})" if isinstance(f, (F.Tensor, F.Plus)) else s


class _NJ:
    def __init__(self, result: Formula):
        self.u = Unifier()
        self.r = result

    def eq(self, a, b, t):
        try:
            self.u.unify(a, b)
        except UnifyError as exc:
            raise TypeCheckError(f"type mismatch: {exc}", t) from None

    def cmd(self, t: Node, G) -> None:
        if not isinstance(t, App):
            raise TypeCheckError("expected an application V V", t)
        a = self.u.fresh()
        self.value(t.fun, G, F.NotP(a))
        self.value(t.arg, G, a)

    def value(self, t: Node, G, A) -> None:
        u = self.u
        match t:
            case Var(x):
                if x not in G:
                    raise TypeCheckError(f"unbound variable {x}", t)
                self.eq(G[x], A, t)
            case Pair(a, b):
                m1, m2 = u.fresh(), u.fresh()
                self.eq(A, F.Tensor(m1, m2), t)
                self.value(a, G, m1)
                self.value(b, G, m2)
            case Inl(b) | Inr(b):
                m1, m2 = u.fresh(), u.fresh()
                self.eq(A, F.Plus(m1, m2), t)
                self.value(b, G, m1 if isinstance(t, Inl) else m2)
            case Lam(x, c):
                m = u.fresh()
                self.eq(A, F.NotP(m), t)
                self.cmd(c, {**G, x: m})
            case LamP(x1, x2, c):
                m1, m2 = u.fresh(), u.fresh()
                self.eq(A, F.NotP(F.Tensor(m1, m2)), t)
                self.cmd(c, {**G, x1: m1, x2: m2})
            case LamCase(_, x1, c1, x2, c2):
                m1, m2 = u.fresh(), u.fresh()
                self.eq(A, F.NotP(F.Plus(m1, m2)), t)
                self.cmd(c1, {**G, x1: m1})
                self.cmd(c2, {**G, x2: m2})
            case _:
                raise TypeCheckError("expected an NJ value", t)


def nj_typecheck(t: Node, gamma: Mapping[str, Formula], kind: str = "command",
                 formula: Formula | None = None, result: Formula = RESULT) -> Formula:
    """Type of an NJ command (always ``result``) or value; raises TypeCheckError."""
    eng = _NJ(result)
    if kind == "command":
        eng.cmd(t, dict(gamma))
        return result
    A = formula if formula is not None else eng.u.fresh()
    eng.value(t, dict(gamma), A)
    return eng.u.resolve(A)


# ---------------------------------------------------------------- lambda-mu typing

class _LM:
    def __init__(self):
        self.u = Unifier()

    def eq(self, a, b, t):
        try:
            self.u.unify(a, b)
        except UnifyError as exc:
            raise TypeCheckError(f"type mismatch: {exc}", t) from None

    def term(self, t: Node, G, D, A) -> None:
        u = self.u
        match t:
            case Var(x):
                if x not in G:
                    raise TypeCheckError(f"unbound variable {x}", t)
                self.eq(G[x], A, t)
            case Lam(x, b):
                m1, m2 = u.fresh(), u.fresh()
                self.eq(A, F.Arrow(m1, m2), t)
                self.term(b, {**G, x: m1}, D, m2)
            case App(f, a):
                m = u.fresh()
                self.term(f, G, D, F.Arrow(m, A))
                self.term(a, G, D, m)
            case Pair(a, b):
                m1, m2 = u.fresh(), u.fresh()
                self.eq(A, F.Tensor(m1, m2), t)
                self.term(a, G, D, m1)
                self.term(b, G, D, m2)
            case Inl(b) | Inr(b):
                m1, m2 = u.fresh(), u.fresh()
                self.eq(A, F.Plus(m1, m2), t)
                self.term(b, G, D, m1 if isinstance(t, Inl) else m2)
            case Mu(a, Named(b, body)):
                D2 = {**D, a: A}
                if b not in D2:
                    raise TypeCheckError(f"unbound covariable {b}", t)
                self.term(body, G, D2, D2[b])
            case _:
                raise TypeCheckError(f"no simple type for {type(t).__name__}", t)


def lam_typecheck(t: Node, gamma: Mapping[str, Formula] | None = None,
                  delta: Mapping[str, Formula] | None = None) -> Formula:
    """Simple type of a lambda-mu term (metavariables left in place if unconstrained)."""
    eng = _LM()
    A = eng.u.fresh()
    eng.term(t, dict(gamma or {}), dict(delta or {}), A)
    return eng.u.resolve(A)
