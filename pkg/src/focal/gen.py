"""Type-directed random generators.

Terms are grown from a sequent: a formula is chosen for each cut and the
derivation is extended rule by rule, so every generated term is well typed
by construction.  All randomness comes from an explicit ``random.Random``.
"""
from __future__ import annotations

import itertools
import random
from typing import Iterator

from . import formula as F
from .formula import Formula
from .patterns import CoPat, QBul, QCopair, QPair, QVar
from .terms import (
    Bullet, Cmd, CoPairC, CoVar, Down, Inl, Inr, Mu, MuT, MuTB, MuTP, MuTS, Node, Pair, Val, Var,
)

X, Y = F.Atom("X"), F.Atom("Y")
GAMMA0 = {"x0": X, "y0": Y}
DELTA0 = {"a0": X, "b0": Y}
LLP_GAMMA0 = {"x0": X, "y0": Y, "k0": F.NotP(X), "h0": F.NotP(Y)}


def random_formula(rng: random.Random, size: int, atoms=(X, Y)) -> Formula:
    """A positive formula with exactly ``size`` symbols."""
    if size <= 1:
        return rng.choice(atoms)
    if size == 2:
        return F.NotP(rng.choice(atoms))
    ctor = rng.choice([F.NotP, F.Tensor, F.Plus])
    if ctor is F.NotP:
        return F.NotP(random_formula(rng, size - 1, atoms))
    k = rng.randint(1, size - 2)
    return ctor(random_formula(rng, k, atoms), random_formula(rng, size - 1 - k, atoms))


def all_formulas(size: int, atoms=(X,)) -> Iterator[Formula]:
    """Every positive formula with exactly ``size`` symbols."""
    if size == 1:
        yield from atoms
        return
    for b in all_formulas(size - 1, atoms):
        yield F.NotP(b)
    for k in range(1, size - 1):
        for a in all_formulas(k, atoms):
            for b in all_formulas(size - 1 - k, atoms):
                yield F.Tensor(a, b)
                yield F.Plus(a, b)


class _Names:
    def __init__(self):
        self.n = itertools.count()

    def var(self) -> str:
        return f"x{next(self.n) + 1}"

    def covar(self) -> str:
        return f"a{next(self.n) + 1}"


class LfocGen:
    """Random well-typed focalised commands over the atoms X and Y.

    ``depth`` bounds the nesting of commands; at depth 0 a command is an
    axiom cut ``<val x|a>`` on an atom.
    """

    def __init__(self, rng: random.Random, depth: int = 7, max_cut: int = 4):
        self.rng = rng
        self.depth = depth
        self.max_cut = max_cut
        self.names = _Names()

    def command(self, G=None, D=None, depth: int | None = None) -> Node:
        G = dict(GAMMA0 if G is None else G)
        D = dict(DELTA0 if D is None else D)
        d = self.depth if depth is None else depth
        if d <= 0 or self.rng.random() < 0.1:
            return self._axiom(G, D)
        P = random_formula(self.rng, self.rng.randint(1, self.max_cut))
        return Cmd(self.expr(G, D, P, d - 1), self.context(G, D, P, d - 1))

    def _axiom(self, G, D) -> Node:
        pairs = [(x, a) for x, A in G.items() for a, B in D.items() if A == B and F.is_atomic(A)]
        x, a = self.rng.choice(pairs)
        return Cmd(Val(Var(x)), CoVar(a))

    def expr(self, G, D, P, d) -> Node:
        if d > 0 and self.rng.random() < 0.35:
            a = self.names.covar()
            return Mu(a, self.command(G, {**D, a: P}, d))
        return Val(self.value(G, D, P, d))

    def value(self, G, D, P, d) -> Node:
        rng = self.rng
        here = [x for x, A in G.items() if A == P]
        if here and (F.is_atomic(P) or rng.random() < 0.3):
            return Var(rng.choice(here))
        match P:
            case F.Tensor(A, B):
                return Pair(self.value(G, D, A, d), self.value(G, D, B, d))
            case F.Plus(A, B):
                return Inl(self.value(G, D, A, d)) if rng.random() < 0.5 else Inr(self.value(G, D, B, d))
            case F.NotP(A):
                return Bullet(self.context(G, D, A, d))
        raise ValueError(f"no variable of atomic formula {F.show_formula(P)}")

    def context(self, G, D, P, d) -> Node:
        rng = self.rng
        here = [a for a, A in D.items() if A == P]
        if here and (d <= 0 or rng.random() < 0.3):
            return CoVar(rng.choice(here))
        if rng.random() < 0.3 or F.is_atomic(P):
            x = self.names.var()
            return MuT(x, self.command({**G, x: P}, D, d))
        match P:
            case F.NotP(A):
                a = self.names.covar()
                return MuTB(a, self.command(G, {**D, a: A}, d))
            case F.Tensor(A, B):
                x1, x2 = self.names.var(), self.names.var()
                return MuTP(x1, x2, self.command({**G, x1: A, x2: B}, D, d))
            case F.Plus(A, B):
                x1, x2 = self.names.var(), self.names.var()
                return MuTS(x1, self.command({**G, x1: A}, D, d), x2, self.command({**G, x2: B}, D, d))
        raise AssertionError(P)


def lfoc_commands(seed: int, count: int, depth: int = 7) -> list[Node]:
    gen = LfocGen(random.Random(seed), depth)
    return [gen.command() for _ in range(count)]


class LlpGen:
    """Random well-typed commands of the polarised subsystem (right-empty sequents)."""

    def __init__(self, rng: random.Random, depth: int = 5, max_cut: int = 4):
        self.rng = rng
        self.depth = depth
        self.max_cut = max_cut
        self.names = _Names()

    def command(self, G=None, depth: int | None = None) -> Node:
        G = dict(LLP_GAMMA0 if G is None else G)
        d = self.depth if depth is None else depth
        if d <= 0 or self.rng.random() < 0.1:
            ks = [(k, A.body) for k, A in G.items() if isinstance(A, F.NotP) and F.is_atomic(A.body)]
            k, A = self.rng.choice(ks)
            return Cmd(Var(k), Down(self.value(G, A, 0)))
        P = random_formula(self.rng, self.rng.randint(1, self.max_cut))
        return Cmd(self.value(G, P, d - 1), self.context(G, P, d - 1))

    def value(self, G, P, d) -> Node:
        rng = self.rng
        here = [x for x, A in G.items() if A == P]
        if here and (F.is_atomic(P) or rng.random() < 0.4 or d <= 0):
            return Var(rng.choice(here))
        match P:
            case F.Tensor(A, B):
                return Pair(self.value(G, A, d), self.value(G, B, d))
            case F.Plus(A, B):
                return Inl(self.value(G, A, d)) if rng.random() < 0.5 else Inr(self.value(G, B, d))
            case F.NotP(A):
                return Bullet(self.context(G, A, d))
        raise ValueError(f"no variable of atomic formula {F.show_formula(P)}")

    def context(self, G, P, d) -> Node:
        rng = self.rng
        if isinstance(P, F.NotP) and rng.random() < 0.4:
            return Down(self.value(G, P.body, d))
        if rng.random() < 0.3 or F.is_atomic(P) or isinstance(P, F.NotP):
            x = self.names.var()
            return MuT(x, self.command({**G, x: P}, d))
        match P:
            case F.Tensor(A, B):
                x1, x2 = self.names.var(), self.names.var()
                return MuTP(x1, x2, self.command({**G, x1: A, x2: B}, d))
            case F.Plus(A, B):
                x1, x2 = self.names.var(), self.names.var()
                return MuTS(x1, self.command({**G, x1: A}, d), x2, self.command({**G, x2: B}, d))
        raise AssertionError(P)


def llp_commands(seed: int, count: int, depth: int = 5) -> list[Node]:
    gen = LlpGen(random.Random(seed), depth)
    return [gen.command() for _ in range(count)]


# ---------------------------------------------------------------- counterpattern trees

def copattern_for(P: Formula, base: str = "z") -> CoPat:
    """The full decomposition of a hypothesis of formula P, leaves named base_i."""
    counter = itertools.count(1)

    def go(P):
        match P:
            case F.NotP():
                return QBul(f"{base}{next(counter)}")
            case F.Tensor(A, B):
                return QPair(go(A), go(B))
            case F.Plus(A, B):
                return QCopair(go(A), go(B))
        return QVar(f"{base}{next(counter)}")

    return go(P)


def _copairs(q: CoPat) -> list[QCopair]:
    """Copairings reachable without selecting a branch."""
    match q:
        case QPair(a, b):
            return _copairs(a) + _copairs(b)
        case QCopair():
            return [q]
    return []


def random_tree(rng: random.Random, q: CoPat, leaf: Node) -> Node:
    """A copairing tree for q, with a random order of decomposition."""
    def go(avail):
        if not avail:
            return leaf
        i = rng.randrange(len(avail))
        cp, rest = avail[i], avail[:i] + avail[i + 1:]
        return CoPairC(go(rest + _copairs(cp.left)), cp.left, cp.right, go(rest + _copairs(cp.right)))
    return go(_copairs(q))


def all_trees(q: CoPat, leaf: Node) -> Iterator[Node]:
    """Every copairing tree for q (all decomposition orders)."""
    def go(avail):
        if not avail:
            yield leaf
            return
        for i, cp in enumerate(avail):
            rest = avail[:i] + avail[i + 1:]
            for l in go(rest + _copairs(cp.left)):
                for r in go(rest + _copairs(cp.right)):
                    yield CoPairC(l, cp.left, cp.right, r)
    yield from go(_copairs(q))
