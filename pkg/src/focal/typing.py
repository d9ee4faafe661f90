"""Unification-based type inference shared by LKQ, raw LK and the LLP subsystem.

Bound names carry no annotations, so every binder gets a metavariable and
the rules of each system become unification constraints.  A successful run
yields a :class:`Derivation` whose formulas are resolved at the end.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from . import formula as F
from .formula import Formula, Meta, Unifier, UnifyError
from .terms import (
    Bullet, Cmd, CoVar, Down, Inl, Inr, Mu, MuT, MuTB, MuTP, MuTS, Node, Pair, Sub, Val, Var,
)

KINDS = ("command", "expr", "value", "context")


class TypeCheckError(Exception):
    def __init__(self, msg: str, subject: Node | None = None, path: tuple = ()):
        where = f" in {subject}" if subject is not None else ""
        super().__init__(msg + where)
        self.msg, self.subject, self.path = msg, subject, path


@dataclass
class Derivation:
    rule: str
    kind: str
    subject: Node
    formula: Formula | None
    premises: list["Derivation"] = field(default_factory=list)
    path: tuple = ()

    def render(self, indent: int = 0) -> str:
        f = f" : {F.show_formula(self.formula)}" if self.formula is not None else ""
        lines = [f"{'  ' * indent}{self.rule}  {self.subject}{f}"]
        for p in self.premises:
            lines.append(p.render(indent + 1))
        return "\n".join(lines)

    def walk(self):
        yield self
        for p in self.premises:
            yield from p.walk()


# Connective constructors per logic.
_CONN = {
    "lkq": (F.Tensor, F.Plus, F.NotP),
    "llp": (F.Tensor, F.Plus, F.NotP),
    "lk": (F.And, F.Or, F.Neg),
}


class Engine:
    """Rule-by-rule checker; ``logic`` is 'lkq', 'lk' or 'llp'."""

    def __init__(self, logic: str = "lkq", record: Callable | None = None):
        self.logic = logic
        self.u = Unifier()
        self.conj, self.disj, self.neg = _CONN[logic]
        self.record = record  # called as record(path, cut_formula) at each command

    # -- helpers
    def eq(self, a: Formula, b: Formula, t: Node, path) -> None:
        try:
            self.u.unify(a, b)
        except UnifyError as exc:
            raise TypeCheckError(f"formula mismatch: {exc}", t, path) from None

    def split2(self, ctor, a: Formula, t: Node, path):
        m1, m2 = self.u.fresh(), self.u.fresh()
        self.eq(a, ctor(m1, m2), t, path)
        return m1, m2

    def split1(self, ctor, a: Formula, t: Node, path):
        m = self.u.fresh()
        self.eq(a, ctor(m), t, path)
        return m

    # -- categories
    def command(self, c: Node, G, D, path=()) -> Derivation:
        match c:
            case Cmd(l, r):
                m = self.u.fresh()
                if self.record:
                    self.record(path, m)
                if self.logic == "llp":
                    d1 = self.value(l, G, D, m, path + (0,))
                else:
                    d1 = self.expr(l, G, D, m, path + (0,))
                d2 = self.context(r, G, D, m, path + (1,))
                return Derivation("cut", "command", c, None, [d1, d2], path)
            case Sub():
                return self.sub(c, G, D, None, "command", path)
        raise TypeCheckError("expected a command", c, path)

    def expr(self, v: Node, G, D, A, path=()) -> Derivation:
        if self.logic == "lk":
            return self.lk_expr(v, G, D, A, path)
        match v:
            case Val(V):
                return Derivation("val", "expr", v, A, [self.value(V, G, D, A, path + (0,))], path)
            case Mu(a, c):
                if self.logic == "llp":
                    break_llp(v, path)
                return Derivation("mu", "expr", v, A, [self.command(c, G, {**D, a: A}, path + (0,))], path)
            case Sub():
                return self.sub(v, G, D, A, "expr", path)
        raise TypeCheckError("expected an expression", v, path)

    def value(self, V: Node, G, D, A, path=()) -> Derivation:
        if self.logic == "lk":
            return self.lk_expr(V, G, D, A, path)
        match V:
            case Var(x):
                if x not in G:
                    raise TypeCheckError(f"unbound variable {x}", V, path)
                self.eq(G[x], A, V, path)
                return Derivation("ax-r", "value", V, A, [], path)
            case Bullet(e):
                m = self.split1(self.neg, A, V, path)
                return Derivation("not-r", "value", V, A, [self.context(e, G, D, m, path + (0,))], path)
            case Pair(a, b):
                m1, m2 = self.split2(self.conj, A, V, path)
                return Derivation("tensor-r", "value", V, A,
                                  [self.value(a, G, D, m1, path + (0,)), self.value(b, G, D, m2, path + (1,))], path)
            case Inl(b):
                m1, _ = self.split2(self.disj, A, V, path)
                return Derivation("plus-r1", "value", V, A, [self.value(b, G, D, m1, path + (0,))], path)
            case Inr(b):
                _, m2 = self.split2(self.disj, A, V, path)
                return Derivation("plus-r2", "value", V, A, [self.value(b, G, D, m2, path + (0,))], path)
            case Sub():
                return self.sub(V, G, D, A, "value", path)
        raise TypeCheckError("expected a value", V, path)

    def lk_expr(self, v: Node, G, D, A, path) -> Derivation:
        match v:
            case Var(x):
                if x not in G:
                    raise TypeCheckError(f"unbound variable {x}", v, path)
                self.eq(G[x], A, v, path)
                return Derivation("ax-r", "expr", v, A, [], path)
            case Mu(a, c):
                return Derivation("mu", "expr", v, A, [self.command(c, G, {**D, a: A}, path + (0,))], path)
            case Bullet(e):
                m = self.split1(self.neg, A, v, path)
                return Derivation("not-r", "expr", v, A, [self.context(e, G, D, m, path + (0,))], path)
            case Pair(a, b):
                m1, m2 = self.split2(self.conj, A, v, path)
                return Derivation("and-r", "expr", v, A,
                                  [self.lk_expr(a, G, D, m1, path + (0,)), self.lk_expr(b, G, D, m2, path + (1,))], path)
            case Inl(b):
                m1, _ = self.split2(self.disj, A, v, path)
                return Derivation("or-r1", "expr", v, A, [self.lk_expr(b, G, D, m1, path + (0,))], path)
            case Inr(b):
                _, m2 = self.split2(self.disj, A, v, path)
                return Derivation("or-r2", "expr", v, A, [self.lk_expr(b, G, D, m2, path + (0,))], path)
            case Sub():
                return self.sub(v, G, D, A, "expr", path)
        raise TypeCheckError("expected an LK expression", v, path)

    def context(self, e: Node, G, D, A, path=()) -> Derivation:
        match e:
            case CoVar(a):
                if self.logic == "llp":
                    raise TypeCheckError("covariables do not exist in right-empty sequents", e, path)
                if a not in D:
                    raise TypeCheckError(f"unbound covariable {a}", e, path)
                self.eq(D[a], A, e, path)
                return Derivation("ax-l", "context", e, A, [], path)
            case MuT(x, c):
                return Derivation("mu-tilde", "context", e, A, [self.command(c, {**G, x: A}, D, path + (0,))], path)
            case MuTB(a, c):
                if self.logic == "llp":
                    break_llp(e, path)
                m = self.split1(self.neg, A, e, path)
                return Derivation("not-l", "context", e, A, [self.command(c, G, {**D, a: m}, path + (0,))], path)
            case MuTP(x1, x2, c):
                if x1 == x2:
                    raise TypeCheckError("pair binder binds the same name twice", e, path)
                m1, m2 = self.split2(self.conj, A, e, path)
                return Derivation("tensor-l", "context", e, A,
                                  [self.command(c, {**G, x1: m1, x2: m2}, D, path + (0,))], path)
            case MuTS(x1, c1, x2, c2):
                m1, m2 = self.split2(self.disj, A, e, path)
                return Derivation("plus-l", "context", e, A,
                                  [self.command(c1, {**G, x1: m1}, D, path + (0,)),
                                   self.command(c2, {**G, x2: m2}, D, path + (1,))], path)
            case Down(V):
                if self.logic != "llp":
                    raise TypeCheckError("dereliction belongs to the polarised subsystem", e, path)
                m = self.split1(self.neg, A, e, path)
                return Derivation("derel", "context", e, A, [self.value(V, G, D, m, path + (0,))], path)
            case Sub():
                return self.sub(e, G, D, A, "context", path)
        raise TypeCheckError("expected a context", e, path)

    def sub(self, t: Sub, G, D, A, kind, path) -> Derivation:
        """Multicut: every binding is checked in the outer environment."""
        G2, D2, prem = dict(G), dict(D), []
        for i, (ns, n, b) in enumerate(t.binds, start=1):
            m = self.u.fresh()
            if ns == "v":
                prem.append(self.value(b, G, D, m, path + (i,)))
                G2[n] = m
            else:
                prem.append(self.context(b, G, D, m, path + (i,)))
                D2[n] = m
        body = {"command": lambda: self.command(t.body, G2, D2, path + (0,)),
                "expr": lambda: self.expr(t.body, G2, D2, A, path + (0,)),
                "value": lambda: self.value(t.body, G2, D2, A, path + (0,)),
                "context": lambda: self.context(t.body, G2, D2, A, path + (0,))}[kind]()
        return Derivation("subst", kind, t, A, [body] + prem, path)

    def run(self, kind: str, t: Node, G, D, A) -> Derivation:
        if kind == "command":
            return self.command(t, G, D)
        return {"expr": self.expr, "value": self.value, "context": self.context}[kind](t, G, D, A)

    def finish(self, d: Derivation) -> Derivation:
        for node in d.walk():
            if node.formula is not None:
                node.formula = self.u.resolve(node.formula)
        return d


def break_llp(t: Node, path):
    raise TypeCheckError("construct absent from the polarised subsystem", t, path)


def check_env_formulas(env: Mapping[str, Formula], logic: str) -> None:
    ok = {"lkq": F.is_positive, "llp": F.is_positive, "lk": F.is_lk}[logic]
    for n, f in env.items():
        if not ok(f):
            raise TypeCheckError(f"formula {F.show_formula(f)} of {n} is not allowed here")


def infer(t: Node, kind: str, gamma: Mapping, delta: Mapping, logic: str = "lkq",
          formula: Formula | None = None) -> tuple[Derivation, Formula | None]:
    """Check ``t`` and return its derivation and (resolved) formula."""
    if kind not in KINDS:
        raise ValueError(f"unknown judgement kind {kind!r}")
    check_env_formulas(gamma, logic)
    check_env_formulas(delta, logic)
    eng = Engine(logic)
    A = None
    if kind != "command":
        A = eng.u.fresh() if formula is None else formula
    d = eng.finish(eng.run(kind, t, dict(gamma), dict(delta), A))
    return d, (eng.u.resolve(A) if A is not None else None)


def cut_formulas(c: Node, gamma: Mapping, delta: Mapping, logic: str = "lkq",
                 kind: str = "command", formula: Formula | None = None) -> dict[tuple, Formula]:
    """Path of every command node -> its (resolved) cut formula."""
    seen: dict[tuple, Meta] = {}
    eng = Engine(logic, record=lambda p, m: seen.__setitem__(p, m))
    A = None if kind == "command" else (formula or eng.u.fresh())
    eng.run(kind, c, dict(gamma), dict(delta), A)
    return {p: eng.u.resolve(m) for p, m in seen.items()}
