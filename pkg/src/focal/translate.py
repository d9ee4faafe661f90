"""Translations between the calculi.

* raw LK -> focalised (right introductions of pairs/injections become a
  second-component-first evaluation protocol),
* call-by-value lambda-mu -> focalised, call-by-name lambda-mu -> LKT,
* focalised -> NJ (continuation-passing), focalised -> LLP -> NJ, and the
  right inverse LLP -> focalised.

A covariable ``a`` becomes the variable ``k_a`` in every continuation-based
target; :class:`KNames` fixes that choice once per source term so that the
direct and the factored translations agree on names.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from . import formula as F
from .formula import Formula
from .lam import EqReport, betaeta_report
from .terms import (
    App, Bullet, Cmd, CoVar, Down, Inl, Inr, Lam, LamCase, LamP, Mu, MuB, MuP, MuT, MuTB, MuTP,
    MuTS, Named, Node, Pair, Sub, Val, Var, all_names, alpha_eq, children, fresh, fv, subst,
    with_children,
)


class TranslationError(ValueError):
    pass


class _Fresh:
    """Fresh-name supply avoiding every name of a term (and previous picks)."""

    def __init__(self, *terms: Node):
        self.used: set[str] = set()
        for t in terms:
            self.used |= all_names(t)

    def __call__(self, base: str) -> str:
        n = fresh(base, self.used)
        self.used.add(n)
        return n


# ---------------------------------------------------------------- helpers

def eliminate_subs(t: Node) -> Node:
    """Carry out every explicit substitution (innermost first)."""
    if isinstance(t, (Var, CoVar)):
        return t
    kids = children(t)
    if kids:
        new = [eliminate_subs(k) for k in kids]
        if any(a is not b for a, b in zip(new, kids)):
            t = with_children(t, new)
    if isinstance(t, Sub):
        return subst(t.body, {(ns, n): b for ns, n, b in t.binds})
    return t


def coval(V: Node, avoid: set[str] | None = None) -> Node:
    """coval V = ~mu a^.< val V | a >."""
    a = fresh("a", (avoid or set()) | all_names(V))
    return MuTB(a, Cmd(Val(V), CoVar(a)))


def is_coval(e: Node) -> bool:
    match e:
        case MuTB(a, Cmd(Val(V), CoVar(b))) if a == b and ("c", a) not in fv(V):
            return True
    return False


class KNames:
    """Deterministic covariable -> variable naming, ``k_`` + name, collision-checked."""

    def __init__(self, *terms: Node):
        self.taken: set[str] = set()
        for t in terms:
            self.taken |= all_names(t)
        self.table: dict[str, str] = {}

    def __call__(self, a: str) -> str:
        if a not in self.table:
            n = "k_" + a
            if n in self.taken or n in self.table.values():
                n = fresh(n, self.taken | set(self.table.values()))
            self.table[a] = n
        return self.table[a]


# ---------------------------------------------------------------- LK -> LKQ

class _LKtoLKQ:
    def __init__(self, t: Node):
        self.fresh = _Fresh(t)

    def value(self, v: Node) -> Node | None:
        """LKQ value for LK expressions that are syntactically values."""
        match v:
            case Var():
                return v
            case Bullet(e):
                return Bullet(self.ctx(e))
            case Pair(a, b):
                va, vb = self.value(a), self.value(b)
                return Pair(va, vb) if va is not None and vb is not None else None
            case Inl(b) | Inr(b):
                vb = self.value(b)
                return type(v)(vb) if vb is not None else None
        return None

    def expr(self, v: Node) -> Node:
        V = self.value(v)
        if V is not None:
            return Val(V)
        match v:
            case Mu(a, c):
                return Mu(a, self.cmd(c))
            case Pair(v1, v2):
                a, x1, x2 = self.fresh("a"), self.fresh("x"), self.fresh("x")
                inner = Cmd(Val(Pair(Var(x1), Var(x2))), CoVar(a))
                return Mu(a, Cmd(self.expr(v2), MuT(x2, Cmd(self.expr(v1), MuT(x1, inner)))))
            case Inl(b) | Inr(b):
                a, x = self.fresh("a"), self.fresh("x")
                return Mu(a, Cmd(self.expr(b), MuT(x, Cmd(Val(type(v)(Var(x))), CoVar(a)))))
            case Sub(body, binds):
                if all(ns == "c" or self.value(b) is not None for ns, _, b in binds):
                    return Sub(self.expr(body), self._keep(binds))
                b = self.fresh("b")
                return Mu(b, self._sub(body, binds, lambda t: Cmd(self.expr(t), CoVar(b))))
        raise TranslationError(f"not an LK expression: {v}")

    def ctx(self, e: Node) -> Node:
        match e:
            case CoVar():
                return e
            case MuT(x, c):
                return MuT(x, self.cmd(c))
            case MuTB(a, c):
                return MuTB(a, self.cmd(c))
            case MuTP(x1, x2, c):
                return MuTP(x1, x2, self.cmd(c))
            case MuTS(x1, c1, x2, c2):
                return MuTS(x1, self.cmd(c1), x2, self.cmd(c2))
            case Sub(body, binds):
                if all(ns == "c" or self.value(b) is not None for ns, _, b in binds):
                    return Sub(self.ctx(body), self._keep(binds))
                y = self.fresh("y")
                return MuT(y, self._sub(body, binds, lambda t: Cmd(Val(Var(y)), self.ctx(t))))
        raise TranslationError(f"not an LK context: {e}")

    def cmd(self, c: Node) -> Node:
        match c:
            case Cmd(v, e):
                return Cmd(self.expr(v), self.ctx(e))
            case Sub(body, binds):
                return self._sub(body, binds, self.cmd)
        raise TranslationError(f"not an LK command: {c}")

    def _keep(self, binds) -> tuple:
        return tuple((ns, n, self.ctx(b) if ns == "c" else self.value(b)) for ns, n, b in binds)

    def _sub(self, body, binds, close) -> Node:
        """Command standing for ``body[binds]``; ``close`` turns the body into a command.

        Value and context bindings stay explicit.  A binding of a
        non-value becomes a cut on a fresh variable placed outside.
        """
        keep, cuts, ren = [], [], {}
        for ns, n, b in binds:
            if ns == "c":
                keep.append(("c", n, self.ctx(b)))
            elif (V := self.value(b)) is not None:
                keep.append(("v", n, V))
            else:
                n2 = self.fresh(n)
                ren[("v", n)] = Var(n2)
                cuts.append((n2, self.expr(b)))
        c = close(subst(body, ren) if ren else body)
        if keep:
            c = Sub(c, tuple(keep))
        for n, v in reversed(cuts):
            c = Cmd(v, MuT(n, c))
        return c


def lk_to_lkq(t: Node) -> Node:
    """Raw LK term (command, expression or context) into the focalised calculus."""
    tr = _LKtoLKQ(t)
    match t:
        case Cmd() | Sub(Cmd() | Sub(), _):
            return tr.cmd(t)
        case CoVar() | MuT() | MuTB() | MuTP() | MuTS():
            return tr.ctx(t)
    return tr.expr(t)


def lk_formula_to_lkq(f: Formula) -> Formula:
    return F.lk_to_positive(f)


# ---------------------------------------------------------------- CBV lambda-mu -> LKQ

def cbv_formula(A: Formula) -> Formula:
    """A ->v B = ~(A * ~B); products and sums are kept."""
    match A:
        case F.Arrow(a, b):
            return F.NotP(F.Tensor(cbv_formula(a), F.NotP(cbv_formula(b))))
        case F.Tensor(a, b) | F.Plus(a, b):
            return type(A)(cbv_formula(a), cbv_formula(b))
    return A


def cv_pair_binder(x: str, a: str, body: Node, fresh_name) -> Node:
    """~mu(x, a^).c = ~mu(x, y).< val y | ~mu a^.c >."""
    y = fresh_name("y")
    return MuTP(x, y, Cmd(Val(Var(y)), MuTB(a, body)))


class _CBV:
    def __init__(self, M: Node, admin: bool):
        self.fresh = _Fresh(M)
        self.admin = admin

    def coval(self, V: Node) -> Node:
        a = self.fresh("a")
        return MuTB(a, Cmd(Val(V), CoVar(a)))

    def term(self, M: Node) -> Node:
        match M:
            case Var():
                return Val(M)
            case Lam(x, body):
                a = self.fresh("a")
                b = self.term(body)
                inner = Cmd(b, CoVar(a))
                if self.admin and isinstance(b, Mu):
                    inner = subst(b.body, {("c", b.name): CoVar(a)})
                return Val(Bullet(cv_pair_binder(x, a, inner, self.fresh)))
            case App(f, arg):
                a, x = self.fresh("a"), self.fresh("x")
                return Mu(a, Cmd(self.term(arg),
                                 MuT(x, Cmd(self.term(f), self.coval(Pair(Var(x), Bullet(CoVar(a))))))))
            case Mu(a, Named(b, body)):
                return Mu(a, Cmd(self.term(body), CoVar(b)))
            case Pair(l, r):
                a, x1, x2 = self.fresh("a"), self.fresh("x"), self.fresh("x")
                inner = Cmd(Val(Pair(Var(x1), Var(x2))), CoVar(a))
                return Mu(a, Cmd(self.term(r), MuT(x2, Cmd(self.term(l), MuT(x1, inner)))))
            case Inl(b) | Inr(b):
                a, x = self.fresh("a"), self.fresh("x")
                return Mu(a, Cmd(self.term(b), MuT(x, Cmd(Val(type(M)(Var(x))), CoVar(a)))))
        raise TranslationError(f"no call-by-value image for {type(M).__name__}")


def cbv_to_lkq(M: Node, administrative: bool = True) -> Node:
    """CBV lambda-mu term to an LKQ expression.

    With ``administrative`` the cut < mu b.c | a > produced under a
    lambda is contracted to c{b:=a} on the fly.
    """
    return _CBV(M, administrative).term(M)


def cbv_to_lkq_named(M: Node, top: str) -> Node:
    """Like cbv_to_lkq but an application at the root binds ``top``."""
    t = cbv_to_lkq(M)
    if isinstance(t, Mu) and top != t.name:
        return Mu(top, subst(t.body, {("c", t.name): CoVar(top)}))
    return t


# ---------------------------------------------------------------- CBN lambda-mu -> LKT

def cbn_formula(A: Formula) -> Formula:
    """A ->n B = (~-A') par B'; atoms become negative atoms."""
    match A:
        case F.Atom(n):
            return F.CoAtom(n)
        case F.Arrow(a, b):
            return F.Par(F.NotN(cbn_formula(a)), cbn_formula(b))
    raise TranslationError(f"no call-by-name image for {F.show_formula(A)}")


class _CBN:
    def __init__(self, M: Node):
        self.fresh = _Fresh(M)

    def term(self, M: Node) -> Node:
        match M:
            case Var():
                return M
            case Lam(x, body):
                a, g = self.fresh("a"), self.fresh("g")
                inner = Cmd(self.term(body), Val(CoVar(a)))
                return MuP(g, a, Cmd(MuB(x, inner), Val(CoVar(g))))
            case App(f, arg):
                a = self.fresh("a")
                return Mu(a, Cmd(self.term(f), Val(Pair(Bullet(self.term(arg)), CoVar(a)))))
            case Mu(a, Named(b, body)):
                return Mu(a, Cmd(self.term(body), Val(CoVar(b))))
        raise TranslationError(f"no call-by-name image for {type(M).__name__}")


def cbn_to_lkt(M: Node) -> Node:
    """CBN lambda-mu term to an LKT expression; stacks M.E are (M^, E)."""
    return _CBN(M).term(M)


def cbn_stack(args, tail: Node) -> Node:
    """The LKT covalue of the stack args[0] . args[1] . ... . tail."""
    E = tail
    for a in reversed(list(args)):
        E = Pair(Bullet(a), E)
    return E


# ---------------------------------------------------------------- LKQ -> NJ

def cps_formula(P: Formula) -> Formula:
    """Formula translation; NJ function types R^A are kept as NotP(A)."""
    match P:
        case F.Atom() | F.Meta():
            return P
        case F.NotP(b):
            return F.NotP(cps_formula(b))
        case F.Tensor(a, b) | F.Plus(a, b):
            return type(P)(cps_formula(a), cps_formula(b))
    raise TranslationError(f"{F.show_formula(P)} is not a positive formula")


def cps_env(gamma: Mapping[str, Formula], delta: Mapping[str, Formula], kn: KNames) -> dict:
    out = {x: cps_formula(f) for x, f in gamma.items()}
    out.update({kn(a): F.NotP(cps_formula(f)) for a, f in delta.items()})
    return out


class _CPS:
    def __init__(self, kn: KNames, t: Node):
        self.k = kn
        self.fresh = _Fresh(t)
        self.fresh.used |= set(kn.table.values()) | {"k_" + n for n in all_names(t)}

    def tr(self, t: Node) -> Node:
        match t:
            case Cmd(v, e):
                return App(self.tr(v), self.tr(e))
            case Val(V):
                k = self.fresh("k")
                return Lam(k, App(Var(k), self.tr(V)))
            case Mu(a, c) | MuTB(a, c):
                return Lam(self.k(a), self.tr(c))
            case Var():
                return t
            case Pair(a, b):
                return Pair(self.tr(a), self.tr(b))
            case Inl(b) | Inr(b):
                return type(t)(self.tr(b))
            case Bullet(e):
                return self.tr(e)
            case CoVar(a):
                return Var(self.k(a))
            case MuT(x, c):
                return Lam(x, self.tr(c))
            case MuTP(x1, x2, c):
                return LamP(x1, x2, self.tr(c))
            case MuTS(x1, c1, x2, c2):
                return LamCase(self.fresh("z"), x1, self.tr(c1), x2, self.tr(c2))
        raise TranslationError(f"no NJ image for {type(t).__name__}")


def lkq_to_nj(t: Node, knames: KNames | None = None) -> Node:
    """Continuation-passing image of an LKQ term (explicit substitutions are carried out first)."""
    t = eliminate_subs(t)
    kn = knames or KNames(t)
    return _CPS(kn, t).tr(t)


# ---------------------------------------------------------------- LKQ -> LLP

class _LLP:
    def __init__(self, kn: KNames, t: Node, optimize: bool):
        self.k = kn
        self.opt = optimize
        self.fresh = _Fresh(t)
        self.fresh.used |= {"k_" + n for n in all_names(t)}

    def tr(self, t: Node) -> Node:
        match t:
            case Cmd(Val(V), e) if self.opt:
                return Cmd(self.tr(V), self.tr(e))
            case Cmd(v, e):
                return Cmd(Bullet(self.tr(e)), self.tr(v))
            case Mu(a, c) | MuTB(a, c):
                if self.opt and isinstance(t, MuTB) and is_coval(t):
                    return Down(self.tr(t.body.left.body))
                return MuT(self.k(a), self.tr(c))
            case Val(V):
                return Down(self.tr(V))
            case CoVar(a):
                x = self.fresh("x")
                return MuT(x, Cmd(Var(self.k(a)), Down(Var(x))))
            case Var():
                return t
            case Pair(a, b):
                return Pair(self.tr(a), self.tr(b))
            case Inl(b) | Inr(b):
                return type(t)(self.tr(b))
            case Bullet(e):
                return Bullet(self.tr(e))
            case MuT(x, c):
                return MuT(x, self.tr(c))
            case MuTP(x1, x2, c):
                return MuTP(x1, x2, self.tr(c))
            case MuTS(x1, c1, x2, c2):
                return MuTS(x1, self.tr(c1), x2, self.tr(c2))
        raise TranslationError(f"no LLP image for {type(t).__name__}")


def lkq_to_llp(t: Node, optimize: bool = False, knames: KNames | None = None) -> Node:
    t = eliminate_subs(t)
    kn = knames or KNames(t)
    return _LLP(kn, t, optimize).tr(t)


def llp_env(gamma: Mapping[str, Formula], delta: Mapping[str, Formula], kn: KNames) -> dict:
    """G, ~D : every a:P on the right becomes k_a:~P on the left."""
    out = dict(gamma)
    out.update({kn(a): F.NotP(f) for a, f in delta.items()})
    return out


def llp_to_lkq(t: Node) -> Node:
    """Right inverse of the optimised LKQ -> LLP translation (down V |-> coval V)."""
    used = all_names(t)

    def go(t):
        match t:
            case Cmd(V, e):
                return Cmd(Val(go(V)), go(e))
            case Down(V):
                return coval(go(V), used)
            case Var():
                return t
            case Pair(a, b):
                return Pair(go(a), go(b))
            case Inl(b) | Inr(b):
                return type(t)(go(b))
            case Bullet(e):
                return Bullet(go(e))
            case MuT(x, c):
                return MuT(x, go(c))
            case MuTP(x1, x2, c):
                return MuTP(x1, x2, go(c))
            case MuTS(x1, c1, x2, c2):
                return MuTS(x1, go(c1), x2, go(c2))
        raise TranslationError(f"not an LLP term: {type(t).__name__}")

    return go(t)


def llp_to_nj(t: Node) -> Node:
    fr = _Fresh(t)

    def go(t):
        match t:
            case Cmd(V, e):
                return App(go(e), go(V))
            case Bullet(e):
                return go(e)
            case Down(V):
                k = fr("k")
                return Lam(k, App(Var(k), go(V)))
            case MuT(x, c):
                return Lam(x, go(c))
            case MuTP(x1, x2, c):
                return LamP(x1, x2, go(c))
            case MuTS(x1, c1, x2, c2):
                return LamCase(fr("z"), x1, go(c1), x2, go(c2))
            case Var():
                return t
            case Pair(a, b):
                return Pair(go(a), go(b))
            case Inl(b) | Inr(b):
                return type(t)(go(b))
        raise TranslationError(f"not an LLP term: {type(t).__name__}")

    return go(t)


# ---------------------------------------------------------------- checks

@dataclass(frozen=True)
class Factorization:
    direct: Node
    factored: Node
    report: EqReport

    @property
    def holds(self) -> bool:
        return self.report.equal


def factorization(t: Node, fuel: int = 10000) -> Factorization:
    """Compare the direct CPS image with the image through LLP (unoptimised)."""
    t = eliminate_subs(t)
    kn = KNames(t)
    direct = lkq_to_nj(t, kn)
    factored = llp_to_nj(lkq_to_llp(t, optimize=False, knames=kn))
    return Factorization(direct, factored, betaeta_report(direct, factored, fuel))


def check_factorization(t: Node, fuel: int = 10000) -> bool:
    """True when the two NJ images are beta-eta equal; raises FuelExhausted on divergence."""
    return factorization(t, fuel).holds


def retraction_holds(t: Node, optimize: bool = True) -> bool:
    """lkq_to_llp(llp_to_lkq(t)) gives back the LLP term ``t``.

    Optimised: up to alpha.  Unoptimised: up to LLP reduction and eta.
    """
    from .llp import llp_equal
    back = lkq_to_llp(llp_to_lkq(t), optimize=optimize)
    if optimize:
        return alpha_eq(back, t)
    return llp_equal(back, t)


def nonreflection_demo(c1: Node, c2: Node, c3: Node, x: str = "x"):
    """< (mu_.c1, mu_.c2) | ~mu x.c3 > : the translation reaches the image of c2.

    Returns (source, translated, normal form of the translation,
    image of c2, whether some source reduct reaches c2).
    """
    from .lk import redexes_lk, step_lk
    from .reduction import normalize
    used = _Fresh(c1, c2, c3)
    d1, d2 = used("d"), used("d")
    src = Cmd(Pair(Mu(d1, c1), Mu(d2, c2)), MuT(x, c3))
    img = lk_to_lkq(src)
    nf = normalize(img).term
    target = lk_to_lkq(c2)
    # the raw source never reaches c2: explore all its reducts (bounded)
    seen, frontier, reached = [src], [src], False
    while frontier and len(seen) < 2000:
        cur = frontier.pop()
        if alpha_eq(cur, c2):
            reached = True
            break
        for r in redexes_lk(cur):
            nxt = step_lk(cur, r)
            if not any(alpha_eq(nxt, s) for s in seen):
                seen.append(nxt)
                frontier.append(nxt)
    return src, img, nf, target, reached


# ---------------------------------------------------------------- continuation-passing checks

def cps_typing_square(t: Node, gamma: Mapping[str, Formula], delta: Mapping[str, Formula],
                      kind: str = "command", formula: Formula | None = None) -> bool:
    """The NJ image is typed by the translated sequent; raises on an ill-typed source."""
    from .lam import RESULT, nj_typecheck
    from .typing import TypeCheckError, infer
    _, P = infer(t, kind, gamma, delta, "lkq", formula)
    if P is not None:
        P = F.ground(P)  # the NJ checker numbers its metavariables afresh
    t = eliminate_subs(t)
    kn = KNames(t)
    img = lkq_to_nj(t, kn)
    env = cps_env(gamma, delta, kn)
    want = {
        "command": None,
        "value": cps_formula(P) if P is not None else None,
        "expr": F.NotP(F.NotP(cps_formula(P))) if P is not None else None,
        "context": F.NotP(cps_formula(P)) if P is not None else None,
    }[kind]
    try:
        if kind == "command":
            nj_typecheck(img, env, "command", result=RESULT)
        else:
            nj_typecheck(img, env, "value", want)
    except TypeCheckError:
        return False
    return True


def nj_reachable(src: Node, dst: Node, depth: int = 4, width: int = 5000) -> bool:
    """Breadth-first search over all beta-reducts of ``src`` for ``dst`` (up to alpha)."""
    from .lam import nj_contract
    from .terms import canon, positions, replace_at
    goal = canon(dst)
    layer, seen = [src], {canon(src)}
    if canon(src) == goal:
        return True
    for _ in range(depth):
        nxt = []
        for t in layer:
            for p, s in positions(t):
                r = nj_contract(s)
                if r is None:
                    continue
                u = replace_at(t, p, r)
                k = canon(u)
                if k == goal:
                    return True
                if k not in seen and len(seen) < width:
                    seen.add(k)
                    nxt.append(u)
        layer = nxt
    return False


def cps_simulation(t: Node, fuel: int = 200, depth: int = 4, strategy: str = "leftmost") -> list:
    """Check every focalised step t -> t' against [t] ->* [t'] in NJ.

    Returns the list of failing trace steps (empty when the simulation holds).
    """
    from .reduction import normalize
    t = eliminate_subs(t)
    kn = KNames(t)
    bad = []
    for st in normalize(t, fuel=fuel, strategy=strategy).trace:
        a = lkq_to_nj(eliminate_subs(st.before), kn)
        b = lkq_to_nj(eliminate_subs(st.after), kn)
        if not nj_reachable(a, b, depth):
            bad.append(st)
    return bad
