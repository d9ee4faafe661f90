"""Synthetic connectives: counterpattern trees, records, and strong focalisation.

Three layers live here:

* the intermediate system, whose contexts ``~mu q.C`` bind a counterpattern
  over a tree ``C`` of copairings ``[C1 |q1,q2| C2]``;
* the record calculus, whose contexts ``~mu q.{p -> c_p}`` carry one field
  per pattern orthogonal to ``q`` and whose values are filled patterns;
* the translation from the focalised calculus into records, by decomposing
  non-atomic hypotheses and collapsing trees into records.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import formula as F
from .formula import Formula, Unifier, UnifyError
from .patterns import (
    CoPat, Pat, PBul, PInl, PInr, PPair, PVar, QBul, QCopair, QPair, QVar,
    orthogonal, pat_leaves, pat_shape, patterns_of, show_copat, show_pat,
)
from .reduction import FUEL, LOOP, NORMAL, Result, TraceStep, multiset_less
from .terms import (
    Bullet, Cmd, CoPairC, CoVar, Inl, Inr, Mu, MuQ, MuQC, MuT, MuTB, MuTP, MuTS, Node, Pair, SVal,
    Sub, Val, Var, all_names, canon, fresh, fv, positions, rename, replace_at, subst,
)
from .typing import TypeCheckError, infer


class MatchError(ValueError):
    """A binding list that the matching rules cannot consume."""


class StrongFocalisationError(TypeCheckError):
    """A value or counterpattern leaf used at a non-atomic hypothesis."""


class SynthError(ValueError):
    """A record redex whose value pattern is not among the fields."""


# ---------------------------------------------------------------- command trees

def leaves(C: Node) -> list[Node]:
    """Simple commands of a copairing tree, left to right."""
    if isinstance(C, CoPairC):
        return leaves(C.left) + leaves(C.right)
    return [C]


def leaf_paths(C: Node, prefix: tuple = ()) -> list[tuple]:
    if isinstance(C, CoPairC):
        return leaf_paths(C.left, prefix + (0,)) + leaf_paths(C.right, prefix + (1,))
    return [prefix]


def _pat_size(p) -> int:
    match p:
        case PVar() | PBul() | QVar() | QBul():
            return 1
        case PInl(b) | PInr(b):
            return 1 + _pat_size(b)
    return 1 + _pat_size(p.left) + _pat_size(p.right)


@dataclass
class MatchOutcome:
    command: Node
    path: tuple
    steps: list[str] = field(default_factory=list)


def match_trace(C: Node, bindings) -> MatchOutcome:
    """Normalise C[q1:=p1,...] with the pair, copair and leaf-deletion rules."""
    work = list(bindings)
    for q, p in work:
        if not orthogonal(q, p):
            raise MatchError(f"{show_copat(q)} is not orthogonal to {show_pat(p)}")
    ren: dict = {}
    path: tuple = ()
    steps: list[str] = []
    while True:
        before = sum(_pat_size(p) for _, p in work)
        changed = False
        nxt = []
        for q, p in work:
            match q, p:
                case QPair(q1, q2), PPair(p1, p2):
                    nxt += [(q1, p1), (q2, p2)]
                    steps.append(f"split {show_copat(q)} := {show_pat(p)}")
                    changed = True
                case (QVar(a), PVar(b)) | (QBul(a), PBul(b)):
                    if a != b:
                        ren[("v" if isinstance(q, QVar) else "c", a)] = b
                    steps.append(f"delete {show_copat(q)} := {show_pat(p)}")
                    changed = True
                case _:
                    nxt.append((q, p))
        work = nxt
        if not changed and isinstance(C, CoPairC):
            sel = QCopair(C.q1, C.q2)
            hit = next((i for i, (q, _) in enumerate(work) if q == sel), None)
            if hit is None:
                raise MatchError(f"no binding selects the copairing on {show_copat(sel)}")
            q, p = work[hit]
            if isinstance(p, PInl):
                work[hit] = (C.q1, p.body)
                C, path = C.left, path + (0,)
                steps.append(f"select left of {show_copat(q)} by {show_pat(p)}")
            else:
                work[hit] = (C.q2, p.body)
                C, path = C.right, path + (1,)
                steps.append(f"select right of {show_copat(q)} by {show_pat(p)}")
            changed = True
        if not changed:
            break
        assert sum(_pat_size(p) for _, p in work) < before, "matching must shrink the bindings"
    if work:
        raise MatchError("unconsumed binding " + ", ".join(
            f"{show_copat(q)} := {show_pat(p)}" for q, p in work))
    if ren:
        C = rename(C, ren)
    return MatchOutcome(C, path, steps)


def match_counterpattern(C: Node, bindings) -> Node:
    return match_trace(C, bindings).command


def leaf_map(C: Node, q: CoPat) -> list[tuple[Pat, Node]]:
    """p -> C[q:=p] for every pattern p orthogonal to q."""
    return [(p, match_counterpattern(C, [(q, p)])) for p in patterns_of(q)]


def bijection_check(C: Node, q: CoPat, gamma: Mapping | None = None,
                    delta: Mapping | None = None, formula: Formula | None = None) -> bool:
    """Is p -> C[q:=p] one-to-one from the patterns of q onto the leaves of C?

    With ``formula`` given, ``~mu q.C`` is first typechecked at that formula
    (raising TypeCheckError when the precondition fails).
    """
    if formula is not None:
        typecheck_intermediate(MuQC(q, C), gamma or {}, delta or {}, "context", formula)
    hit = [match_trace(C, [(q, p)]).path for p in patterns_of(q)]
    return len(set(hit)) == len(hit) and sorted(hit) == sorted(leaf_paths(C))


# ---------------------------------------------------------------- pattern contexts

def gamma_pat(p: Pat, P: Formula) -> list[tuple[Pat, Formula]]:
    """The leaf typing of p at P; raises TypeCheckError where it is undefined."""
    match p, P:
        case PVar(), F.Atom():
            return [(p, P)]
        case PBul(), F.NotP():
            return [(p, P)]
        case PPair(a, b), F.Tensor(A, B):
            return gamma_pat(a, A) + gamma_pat(b, B)
        case PInl(a), F.Plus(A, _):
            return gamma_pat(a, A)
        case PInr(b), F.Plus(_, B):
            return gamma_pat(b, B)
    raise TypeCheckError(f"pattern {show_pat(p)} does not fit {F.show_formula(P)}")


def xi_pat(p: Pat, P: Formula) -> dict[str, Formula]:
    return {l.name: f for l, f in gamma_pat(p, P) if isinstance(l, PVar)}


def delta_pat(p: Pat, P: Formula) -> dict[str, Formula]:
    return {l.name: f.body for l, f in gamma_pat(p, P) if isinstance(l, PBul)}


# ---------------------------------------------------------------- shared checker pieces

class _Base:
    def __init__(self):
        self.u = Unifier()
        self.atomic: list[tuple[Formula, Node | None]] = []

    def eq(self, a, b, t):
        try:
            self.u.unify(a, b)
        except UnifyError as exc:
            raise TypeCheckError(f"formula mismatch: {exc}", t) from None

    def split(self, ctor, A, t):
        ms = [self.u.fresh() for _ in range(1 if ctor is F.NotP else 2)]
        self.eq(A, ctor(*ms), t)
        return ms

    def need_atom(self, A, t):
        self.atomic.append((A, t))

    def finish(self):
        for A, t in self.atomic:
            r = self.u.walk(A)
            if not isinstance(r, (F.Atom, F.Meta)):
                raise StrongFocalisationError(
                    f"hypothesis of non-atomic formula {F.show_formula(self.u.resolve(r))}", t)

    def left_env(self, gamma):
        G, banned = {}, {}
        for x, A in gamma.items():
            if F.is_atomic(A) or isinstance(A, F.Meta):
                G[x] = A
            else:
                banned[x] = A
        return G, banned

    def var(self, x, G, banned, A, t):
        if x in banned:
            raise StrongFocalisationError(
                f"variable {x} of non-atomic formula {F.show_formula(banned[x])} used as a value", t)
        if x not in G:
            raise TypeCheckError(f"unbound variable {x}", t)
        self.eq(G[x], A, t)

    def covar(self, a, D, A, t):
        if a not in D:
            raise TypeCheckError(f"unbound covariable {a}", t)
        self.eq(D[a], A, t)


# ---------------------------------------------------------------- intermediate typing

class _Inter(_Base):
    def tree(self, C, G, banned, Q, D):
        Q = list(Q)
        G, D = dict(G), dict(D)
        copairs = []
        while Q:
            q, A = Q.pop(0)
            match q:
                case QVar(x):
                    self.need_atom(A, C)
                    G[x] = A
                    banned.pop(x, None)
                case QBul(a):
                    (m,) = self.split(F.NotP, A, C)
                    D[a] = m
                case QPair(q1, q2):
                    m1, m2 = self.split(F.Tensor, A, C)
                    Q = [(q1, m1), (q2, m2)] + Q
                case QCopair():
                    copairs.append((q, A))
        if isinstance(C, CoPairC):
            sel = QCopair(C.q1, C.q2)
            i = next((i for i, (q, _) in enumerate(copairs) if q == sel), None)
            if i is None:
                raise TypeCheckError(f"no counterpattern {show_copat(sel)} in the left context", C)
            _, A = copairs.pop(i)
            m1, m2 = self.split(F.Plus, A, C)
            self.tree(C.left, G, dict(banned), copairs + [(C.q1, m1)], D)
            self.tree(C.right, G, dict(banned), copairs + [(C.q2, m2)], D)
            return
        if copairs:
            raise TypeCheckError(
                f"counterpattern {show_copat(copairs[0][0])} needs a copairing node", C)
        self.command(C, G, banned, D)

    def command(self, c, G, banned, D):
        if not isinstance(c, Cmd):
            raise TypeCheckError("expected a command", c)
        m = self.u.fresh()
        self.expr(c.left, G, banned, D, m)
        self.context(c.right, G, banned, D, m)

    def expr(self, v, G, banned, D, A):
        match v:
            case Val(V):
                self.value(V, G, banned, D, A)
            case Mu(a, C):
                self.tree(C, G, banned, [], {**D, a: A})
            case _:
                raise TypeCheckError("expected an expression", v)

    def value(self, V, G, banned, D, A):
        match V:
            case Var(x):
                self.var(x, G, banned, A, V)
            case Pair(a, b):
                m1, m2 = self.split(F.Tensor, A, V)
                self.value(a, G, banned, D, m1)
                self.value(b, G, banned, D, m2)
            case Inl(b) | Inr(b):
                m1, m2 = self.split(F.Plus, A, V)
                self.value(b, G, banned, D, m1 if isinstance(V, Inl) else m2)
            case Bullet(e):
                (m,) = self.split(F.NotP, A, V)
                self.context(e, G, banned, D, m)
            case _:
                raise TypeCheckError("expected a value", V)

    def context(self, e, G, banned, D, A):
        match e:
            case CoVar(a):
                self.covar(a, D, A, e)
            case MuQC(q, C):
                self.tree(C, G, dict(banned), [(q, A)], D)
            case _:
                raise TypeCheckError("expected a context ~mu q.C or a covariable", e)


def typecheck_intermediate(t: Node, gamma: Mapping[str, Formula], delta: Mapping[str, Formula],
                           kind: str = "command", formula: Formula | None = None,
                           qenv=()) -> Formula | None:
    """Check a term of the intermediate system; returns the resolved formula.

    ``gamma`` entries must be atomic (others may only be named, never used);
    ``qenv`` lists extra (counterpattern, formula) hypotheses of a command tree.
    Raises TypeCheckError, or StrongFocalisationError for non-atomic use.
    """
    eng = _Inter()
    G, banned = eng.left_env(gamma)
    D = dict(delta)
    A = None if kind == "command" else (formula if formula is not None else eng.u.fresh())
    if kind == "command":
        eng.tree(t, G, banned, list(qenv), D)
    elif kind == "expr":
        eng.expr(t, G, banned, D, A)
    elif kind == "value":
        eng.value(t, G, banned, D, A)
    elif kind == "context":
        eng.context(t, G, banned, D, A)
    else:
        raise ValueError(f"unknown judgement kind {kind!r}")
    eng.finish()
    return eng.u.resolve(A) if A is not None else None


# ---------------------------------------------------------------- record typing

class _Synth(_Base):
    def pat(self, p, A, t):
        """Unification version of gamma_pat."""
        match p:
            case PVar():
                self.need_atom(A, t)
                return [(p, A)]
            case PBul():
                (m,) = self.split(F.NotP, A, t)
                return [(p, m)]
            case PPair(a, b):
                m1, m2 = self.split(F.Tensor, A, t)
                return self.pat(a, m1, t) + self.pat(b, m2, t)
            case PInl(a):
                m1, _ = self.split(F.Plus, A, t)
                return self.pat(a, m1, t)
            case PInr(b):
                _, m2 = self.split(F.Plus, A, t)
                return self.pat(b, m2, t)
        raise TypeError(p)

    def command(self, c, G, D):
        if not isinstance(c, Cmd):
            raise TypeCheckError("expected a command <v|e>", c)
        m = self.u.fresh()
        self.expr(c.left, G, D, m)
        self.context(c.right, G, D, m)

    def expr(self, v, G, D, A):
        match v:
            case Val(V):
                self.value(V, G, D, A)
            case Mu(a, c):
                self.command(c, G, {**D, a: A})
            case _:
                raise TypeCheckError("expected val V or mu a.c", v)

    def value(self, V, G, D, A):
        if not isinstance(V, SVal):
            raise TypeCheckError("values are filled patterns p{...}", V)
        for (leaf, f), fill in zip(self.pat(V.pat, A, V), V.fills):
            if isinstance(leaf, PVar):
                if not isinstance(fill, Var):
                    raise TypeCheckError(f"leaf {leaf.name} must be filled by a variable", V)
                self.var(fill.name, G, {}, f, V)
            else:
                if not isinstance(fill, Bullet):
                    raise TypeCheckError(f"leaf {leaf.name}^ must be filled by e^", V)
                self.context(fill.body, G, D, f)

    def context(self, e, G, D, A):
        match e:
            case CoVar(a):
                self.covar(a, D, A, e)
            case MuQ(q, fields):
                want = sorted(map(repr, (pat_shape(p) for p in patterns_of(q))))
                have = sorted(map(repr, (pat_shape(p) for p, _ in fields)))
                if want != have:
                    missing = set(want) - set(have)
                    raise TypeCheckError(
                        ("missing" if missing else "extra or duplicate") + " field in the record", e)
                for p, c in fields:
                    G2, D2 = dict(G), dict(D)
                    for leaf, f in self.pat(p, A, e):
                        if isinstance(leaf, PVar):
                            G2[leaf.name] = f
                        else:
                            D2[leaf.name] = f
                    self.command(c, G2, D2)
            case _:
                raise TypeCheckError("expected a covariable or a record ~mu q.{...}", e)


def typecheck_synth(t: Node, gamma: Mapping[str, Formula], delta: Mapping[str, Formula],
                    kind: str = "command", formula: Formula | None = None) -> Formula | None:
    """Check a record-calculus term; left hypotheses must be atomic."""
    eng = _Synth()
    G, banned = eng.left_env(gamma)
    if banned:
        x = next(iter(banned))
        raise StrongFocalisationError(
            f"left hypothesis {x} has non-atomic formula {F.show_formula(banned[x])}")
    D = dict(delta)
    A = None if kind == "command" else (formula if formula is not None else eng.u.fresh())
    {"command": lambda: eng.command(t, G, D),
     "expr": lambda: eng.expr(t, G, D, A),
     "value": lambda: eng.value(t, G, D, A),
     "context": lambda: eng.context(t, G, D, A)}[kind]()
    eng.finish()
    return eng.u.resolve(A) if A is not None else None


def synth_well_typed(t, gamma, delta, kind="command", formula=None) -> bool:
    try:
        typecheck_synth(t, gamma, delta, kind, formula)
        return True
    except TypeCheckError:
        return False


# ---------------------------------------------------------------- record reduction

def synth_root_rule(t: Node) -> str | None:
    match t:
        case Cmd(Val(SVal()), MuQ()):
            return "mu-tilde-plus"
        case Cmd(Mu(), _):
            return "mu"
    return None


def synth_contract(t: Node) -> Node:
    match t:
        case Cmd(Val(SVal(p, fills)), MuQ(_, fields)):
            shape = pat_shape(p)
            hit = next(((fp, c) for fp, c in fields if pat_shape(fp) == shape), None)
            if hit is None:
                raise SynthError(f"pattern {show_pat(p)} is not a field of the record")
            fp, c = hit
            s = {}
            for leaf, fill in zip(pat_leaves(fp), fills):
                if isinstance(leaf, PVar):
                    s[("v", leaf.name)] = fill
                else:
                    s[("c", leaf.name)] = fill.body
            return subst(c, s)
        case Cmd(Mu(a, c), e):
            return subst(c, {("c", a): e})
    raise ValueError("not a redex")


def step_synth(c: Node) -> Node | None:
    """One leftmost-outermost step, or None when ``c`` is normal."""
    for p, s in positions(c):
        if synth_root_rule(s):
            return replace_at(c, p, synth_contract(s))
    return None


def synth_normalize(c: Node, fuel: int = 10000, window: int = 64) -> Result:
    trace: list[TraceStep] = []
    hist = [canon(c)]
    for _ in range(fuel):
        pos = next((p for p, s in positions(c) if synth_root_rule(s)), None)
        if pos is None:
            return Result(c, trace, NORMAL)
        from .terms import subterm_at
        sub = subterm_at(c, pos)
        new = replace_at(c, pos, synth_contract(sub))
        trace.append(TraceStep(synth_root_rule(sub), pos, c, new))
        c = new
        k = canon(c)
        if k in hist:
            return Result(c, trace, LOOP, hist.index(k))
        hist = (hist + [k])[-window:]
    return Result(c, trace, FUEL)


# ---------------------------------------------------------------- sequent decomposition

class _Names:
    """Child names x -> x_1, x_2 (primed away from names already in use).

    Names depend only on the parent, so a hypothesis decomposed in both
    branches of a sum gets the same counterpattern in each.
    """

    def __init__(self, avoid, covars=()):
        self.avoid = set(avoid)
        self.covars = set(covars)

    def child(self, x: str, i: int) -> str:
        n = f"{x}_{i}"
        while n in self.avoid:
            n += "'"
        return n

    def negated(self, x: str) -> str:
        # the covariable standing for x : not P reuses the variable's name
        n = x
        while n in self.covars:
            n += "'"
        return n

    def copat(self, x: str, P: Formula) -> CoPat:
        """The counterpattern that a hypothesis x : P decomposes into."""
        match P:
            case F.NotP():
                return QBul(self.negated(x))
            case F.Tensor(A, B):
                return QPair(self.copat(self.child(x, 1), A), self.copat(self.child(x, 2), B))
            case F.Plus(A, B):
                return QCopair(self.copat(self.child(x, 1), A), self.copat(self.child(x, 2), B))
        return QVar(x)


@dataclass(frozen=True)
class Sequent:
    left: tuple  # of (name, formula), atomic after normalisation
    right: tuple

    def __str__(self) -> str:
        l = ", ".join(f"{x}:{F.show_formula(A)}" for x, A in self.left)
        r = ", ".join(f"{a}:{F.show_formula(A)}" for a, A in self.right)
        return f"{l} |- {r}".strip()


def sequent_normalize(gamma: Mapping[str, Formula], delta: Mapping[str, Formula],
                      avoid=(), covars=()) -> list[Sequent]:
    """Normal form of the decomposition of non-atomic left hypotheses.

    Negations move to the right, tensors split, sums fork the sequent.
    """
    for x, A in gamma.items():
        if not F.is_positive(A):
            raise ValueError(f"left hypothesis {x} is not positive")
    names = _Names(set(avoid) | set(gamma) | set(delta), set(covars) | set(delta))
    todo = [(tuple(gamma.items()), tuple(delta.items()))]
    out = []
    while todo:
        left, right = todo.pop(0)
        i = next((i for i, (_, A) in enumerate(left) if not F.is_atomic(A)), None)
        if i is None:
            out.append(Sequent(left, right))
            continue
        x, A = left[i]
        pre, post = left[:i], left[i + 1:]
        match A:
            case F.NotP(B):
                new = [(pre + post, right + ((names.negated(x), B),))]
            case F.Tensor(B, C):
                new = [(pre + ((names.child(x, 1), B), (names.child(x, 2), C)) + post, right)]
            case F.Plus(B, C):
                new = [(pre + ((names.child(x, 1), B),) + post, right),
                       (pre + ((names.child(x, 2), C),) + post, right)]
        old = [F.size(f) for _, f in left]
        for l2, _ in new:
            assert multiset_less([F.size(f) for _, f in l2], old), "decomposition must shrink"
        todo = new + todo
    return out


# ---------------------------------------------------------------- strong focalisation

def measure(t: Node, gamma, delta, kind: str = "command", formula=None) -> int:
    """Term size where a variable occurrence weighs the size of its formula."""
    d, _ = infer(t, kind, gamma, delta, "lkq", formula)
    total = 0
    for node in d.walk():
        if node.rule == "ax-r" and isinstance(node.subject, Var):
            total += F.size(node.formula) if node.formula is not None else 1
        else:
            total += 1
    return total


class _Focaliser:
    def __init__(self, avoid, covars, check_measure: bool):
        self.names = _Names(avoid, covars)
        self.check = check_measure

    def _bound(self, t, G, D, kind, A, bound):
        if not self.check:
            return None
        m = measure(t, G, D, kind, A)
        if bound is not None:
            assert m < bound, f"focalisation measure did not decrease ({m} >= {bound})"
        return m

    def command(self, c, pending, G, D, bound=None):
        """Tree for c under atomic G plus the hypotheses ``pending`` still to decompose."""
        m = self._bound(c, {**G, **dict(pending)}, D, "command", None, bound)
        return self._decompose(c, list(pending), dict(G), dict(D), m)

    def _decompose(self, c, pending, G, D, m):
        if not pending:
            return self._leaf(c, G, D, m)
        (x, A), rest = pending[0], pending[1:]
        match A:
            case F.NotP(B):
                a = self.names.negated(x)
                c2 = subst(c, {("v", x): Bullet(CoVar(a))})
                return self._decompose(c2, rest, G, {**D, a: B}, m)
            case F.Tensor(B, C):
                x1, x2 = self.names.child(x, 1), self.names.child(x, 2)
                c2 = subst(c, {("v", x): Pair(Var(x1), Var(x2))})
                return self._decompose(c2, [(x1, B), (x2, C)] + rest, G, D, m)
            case F.Plus(B, C):
                x1, x2 = self.names.child(x, 1), self.names.child(x, 2)
                l = self._decompose(subst(c, {("v", x): Inl(Var(x1))}), [(x1, B)] + rest, G, D, m)
                r = self._decompose(subst(c, {("v", x): Inr(Var(x2))}), [(x2, C)] + rest, G, D, m)
                return CoPairC(l, self.names.copat(x1, B), self.names.copat(x2, C), r)
        G = {**G, x: A}
        return self._decompose(c, rest, G, D, m)

    def _leaf(self, c, G, D, bound):
        if self.check:
            m = measure(c, G, D)
            assert bound is None or m <= bound, "a hypothesis substitution grew the term"
            bound = m
        if not isinstance(c, Cmd):
            raise TypeCheckError("expected a command", c)
        A = F.ground(infer_cut(c, G, D))
        return Cmd(self.expr(c.left, G, D, A, bound), self.context(c.right, G, D, A, bound))

    def expr(self, v, G, D, A, bound=None):
        self._bound(v, G, D, "expr", A, bound)
        match v:
            case Val(V):
                return Val(self.value(V, G, D, A, bound))
            case Mu(a, c):
                return Mu(a, self.command(c, [], G, {**D, a: A}, bound))
        raise TypeCheckError("expected an expression", v)

    def value(self, V, G, D, A, bound=None):
        m = self._bound(V, G, D, "value", A, bound)
        match V, A:
            case Var(), _:
                return V
            case Pair(a, b), F.Tensor(P1, P2):
                return Pair(self.value(a, G, D, P1, m), self.value(b, G, D, P2, m))
            case Inl(b), F.Plus(P1, _):
                return Inl(self.value(b, G, D, P1, m))
            case Inr(b), F.Plus(_, P2):
                return Inr(self.value(b, G, D, P2, m))
            case Bullet(e), F.NotP(P):
                return Bullet(self.context(e, G, D, P, m))
        raise TypeCheckError(f"value does not fit {F.show_formula(A)}", V)

    def context(self, e, G, D, A, bound=None):
        m = self._bound(e, G, D, "context", A, bound)
        match e, A:
            case CoVar(), _:
                return e
            case MuT(x, c), _:
                q = self.names.copat(x, A)
                return MuQC(q, self.command(c, [(x, A)], G, D, m))
            case MuTB(a, c), F.NotP(P):
                return MuQC(QBul(a), self.command(c, [], G, {**D, a: P}, m))
            case MuTP(x1, x2, c), F.Tensor(P1, P2):
                q = QPair(self.names.copat(x1, P1), self.names.copat(x2, P2))
                return MuQC(q, self.command(c, [(x1, P1), (x2, P2)], G, D, m))
            case MuTS(x1, c1, x2, c2), F.Plus(P1, P2):
                q1, q2 = self.names.copat(x1, P1), self.names.copat(x2, P2)
                l = self.command(c1, [(x1, P1)], G, D, m)
                r = self.command(c2, [(x2, P2)], G, D, m)
                return MuQC(QCopair(q1, q2), CoPairC(l, q1, q2, r))
        raise TypeCheckError(f"context does not fit {F.show_formula(A)}", e)


def free_names_all(t: Node) -> set[str]:
    return {n for _, n in fv(t)}


def _covariables(t: Node) -> set[str]:
    out = {n for ns, n in fv(t) if ns == "c"}
    for _, s in positions(t):
        for binders, _ in s.groups():
            out |= {n for ns, n in binders if ns == "c"}
    return out


def rename_apart(t: Node, avoid) -> Node:
    """Give every binder of ``t`` a name used nowhere else (free names kept)."""
    used = set(avoid)

    def go(t: Node, env: dict) -> Node:
        if isinstance(t, Var):
            return Var(env.get(("v", t.name), t.name))
        if isinstance(t, CoVar):
            return CoVar(env.get(("c", t.name), t.name))
        occ = t.occurrences()
        if occ:
            t = t.rename_occ({k: env[k] for k in occ if k in env})
        groups = []
        for binders, kids in t.groups():
            env2 = dict(env)
            nb = []
            for ns, n in binders:
                n2 = fresh(n, used)
                used.add(n2)
                env2[(ns, n)] = n2
                nb.append((ns, n2))
            groups.append((tuple(nb), tuple(go(k, env2) for k in kids)))
        return t.remake(groups)

    return go(t, {})


def infer_cut(c: Node, G, D) -> Formula:
    from .typing import cut_formulas
    return cut_formulas(c, G, D)[()]


def collapse(t: Node) -> Node:
    """Turn intermediate trees into records, field p being C[q:=p]."""
    match t:
        case Cmd(v, e):
            return Cmd(collapse(v), collapse(e))
        case Val(V):
            return Val(to_synth_value(V))
        case Mu(a, c):
            return Mu(a, collapse(c))
        case CoVar():
            return t
        case MuQC(q, C):
            return MuQ(q, tuple((p, collapse(c)) for p, c in leaf_map(C, q)))
        case CoPairC():
            raise ValueError("a copairing tree only collapses under its ~mu q binder")
    raise TypeError(f"not an intermediate term: {type(t).__name__}")


def to_synth_value(V: Node, inner=None) -> SVal:
    """Read a value as a pattern whose leaves are its variables and packed contexts.

    ``inner`` converts the packed contexts (default: ``collapse``).
    """
    inner = inner or collapse
    fills: list[Node] = []
    used: set[str] = set()

    def leaf_name(base):
        n = base
        while n in used:
            n += "'"
        used.add(n)
        return n

    def go(V):
        match V:
            case Var(y):
                fills.append(V)
                return PVar(leaf_name(y))
            case Bullet(e):
                fills.append(Bullet(inner(e)))
                return PBul(leaf_name(e.name if isinstance(e, CoVar) else "a"))
            case Pair(a, b):
                return PPair(go(a), go(b))
            case Inl(b):
                return PInl(go(b))
            case Inr(b):
                return PInr(go(b))
        raise TypeError(f"not a value: {type(V).__name__}")

    p = go(V)
    return SVal(p, tuple(fills))


@dataclass
class Focalised:
    """Result of strong focalisation.

    ``term`` is a record-calculus term typed with ``gamma`` (atomic) and
    ``delta``; when some hypotheses were non-atomic it is a context
    ``~mu q.{...}`` of formula ``formula`` binding all of them at once.
    """
    term: Node
    kind: str
    gamma: dict
    delta: dict
    formula: Formula | None
    tree: Node
    copattern: CoPat | None
    sequents: list


def _tuple_copat(qs):
    return qs[0] if len(qs) == 1 else QPair(qs[0], _tuple_copat(qs[1:]))


def _tuple_formula(fs):
    return fs[0] if len(fs) == 1 else F.Tensor(fs[0], _tuple_formula(fs[1:]))


def focalize_strong(t: Node, gamma: Mapping[str, Formula], delta: Mapping[str, Formula],
                    kind: str = "command", formula: Formula | None = None,
                    check_measure: bool = True) -> Focalised:
    """Strongly focalise a typed term of the focalised calculus.

    Non-atomic left hypotheses are only allowed for commands; they are
    decomposed and the resulting tree is closed by a record.
    """
    from .translate import eliminate_subs
    t = eliminate_subs(t)
    gamma, delta = dict(gamma), dict(delta)
    _, A = infer(t, kind, gamma, delta, "lkq", formula)
    A = F.ground(A) if A is not None else None
    t = rename_apart(t, set(gamma) | set(delta) | free_names_all(t))
    avoid = all_names(t) | set(gamma) | set(delta)
    covars = _covariables(t) | set(delta)
    foc = _Focaliser(avoid, covars, check_measure)
    atomic = {x: P for x, P in gamma.items() if F.is_atomic(P)}
    heavy = [(x, P) for x, P in gamma.items() if not F.is_atomic(P)]
    if heavy and kind != "command":
        raise ValueError("non-atomic left hypotheses are only decomposed for commands")
    seqs = sequent_normalize(gamma, delta, avoid, covars) if kind == "command" else []
    if kind == "command":
        tree = foc.command(t, heavy, atomic, delta)
    else:
        tree = {"expr": foc.expr, "value": foc.value, "context": foc.context}[kind](
            t, atomic, delta, A)
    if not heavy:
        out = to_synth_value(tree) if kind == "value" else collapse(tree)
        return Focalised(out, kind, atomic, delta, A, tree, None, seqs)
    q = _tuple_copat([foc.names.copat(x, P) for x, P in heavy])
    P = _tuple_formula([P for _, P in heavy])
    return Focalised(collapse(MuQC(q, tree)), "context", atomic, delta, P, tree, q, seqs)


def transcribe(t: Node) -> Node:
    """Direct reading of a strongly focalised term as a record-calculus term.

    Every binder becomes a record over the corresponding counterpattern; the
    caller guarantees that bound variables have atomic formulas.
    """
    match t:
        case Cmd(v, e):
            return Cmd(transcribe(v), transcribe(e))
        case Val(V):
            return Val(to_synth_value(V, transcribe))
        case Mu(a, c):
            return Mu(a, transcribe(c))
        case CoVar():
            return t
        case MuT(x, c):
            return MuQ(QVar(x), ((PVar(x), transcribe(c)),))
        case MuTB(a, c):
            return MuQ(QBul(a), ((PBul(a), transcribe(c)),))
        case MuTP(x1, x2, c):
            return MuQ(QPair(QVar(x1), QVar(x2)), ((PPair(PVar(x1), PVar(x2)), transcribe(c)),))
        case MuTS(x1, c1, x2, c2):
            return MuQ(QCopair(QVar(x1), QVar(x2)),
                       ((PInl(PVar(x1)), transcribe(c1)), (PInr(PVar(x2)), transcribe(c2))))
        case Sub():
            raise ValueError("explicit substitutions have no direct reading")
    raise TypeError(f"cannot transcribe {type(t).__name__}")
