"""System LKQ: judgements, checking, the call-by-name mirror and eta-equality."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import formula as F
from .formula import Formula
from .terms import (
    Bullet, Cmd, CoVar, Inl, Inr, Mu, MuB, MuP, MuS, MuT, MuTB, MuTP, MuTS, Node, Pair, Sub, Val,
    Var, alpha_eq, children, fresh, fv, all_names, subst, with_children,
)
from .typing import Derivation, TypeCheckError, infer

__all__ = ["Judgement", "typecheck", "typecheck_lkt", "mirror", "check_eta", "eta_normalize",
           "well_typed", "TypeCheckError", "Derivation"]


@dataclass(frozen=True)
class Judgement:
    """c:(G |- D), G |- v:P ; D, G |- V:P ; D (stoup) or G ; e:P |- D."""
    kind: str
    subject: Node
    gamma: Mapping[str, Formula] = field(default_factory=dict)
    delta: Mapping[str, Formula] = field(default_factory=dict)
    formula: Formula | None = None

    def __post_init__(self):
        if self.kind == "command" and self.formula is not None:
            raise ValueError("a command judgement has no formula")


def typecheck(j: Judgement) -> Derivation:
    """Derivation of ``j`` in LKQ; raises :class:`TypeCheckError` on failure.

    With ``formula=None`` the principal formula is inferred and stored in the
    root of the returned derivation.
    """
    d, _ = infer(j.subject, j.kind, j.gamma, j.delta, "lkq", j.formula)
    return d


def well_typed(j: Judgement) -> bool:
    try:
        typecheck(j)
        return True
    except TypeCheckError:
        return False


# ---------------------------------------------------------------- mirror

_KIND_MIRROR = {"command": "command", "expr": "context", "context": "expr",
                "covalue": "value", "value": "covalue"}

_RULE_MIRROR = {"ax-r": "ax-l", "ax-l": "ax-r", "mu": "mu-tilde", "mu-tilde": "mu", "val": "val",
                "not-r": "not-l", "not-l": "not-r", "tensor-r": "par-l", "tensor-l": "par-r",
                "plus-r1": "with-l1", "plus-r2": "with-l2", "plus-l": "with-r", "cut": "cut",
                "subst": "subst"}


def mirror(t: Node) -> Node:
    """Exchange mu and ~mu, variables and covariables; involutive."""
    m = mirror
    match t:
        case Var(n):
            return CoVar(n)
        case CoVar(n):
            return Var(n)
        case Cmd(l, r):
            return Cmd(m(r), m(l))
        case Mu(a, c):
            return MuT(a, m(c))
        case MuT(x, c):
            return Mu(x, m(c))
        case MuTB(a, c):
            return MuB(a, m(c))
        case MuB(x, c):
            return MuTB(x, m(c))
        case MuTP(x1, x2, c):
            return MuP(x1, x2, m(c))
        case MuP(a1, a2, c):
            return MuTP(a1, a2, m(c))
        case MuTS(x1, c1, x2, c2):
            return MuS(x1, m(c1), x2, m(c2))
        case MuS(a1, c1, a2, c2):
            return MuTS(a1, m(c1), a2, m(c2))
        case Val() | Pair() | Inl() | Inr() | Bullet():
            return with_children(t, [m(k) for k in children(t)])
        case Sub(b, binds):
            return Sub(m(b), tuple(("c" if ns == "v" else "v", n, m(x)) for ns, n, x in binds))
    raise TypeError(f"no mirror image for {type(t).__name__}")


def typecheck_lkt(j: Judgement) -> Derivation:
    """LKT judgement (negative formulas) checked through its LKQ mirror."""
    try:
        gamma = {a: F.dual_formula(f) for a, f in j.delta.items()}
        delta = {x: F.dual_formula(f) for x, f in j.gamma.items()}
        formula = F.dual_formula(j.formula) if j.formula is not None else None
    except ValueError as exc:
        raise TypeCheckError(f"LKT formulas must be negative: {exc}") from None
    kind = _KIND_MIRROR[j.kind]
    try:
        d, _ = infer(mirror(j.subject), kind, gamma, delta, "lkq", formula)
    except TypeCheckError as exc:
        subj = mirror(exc.subject) if exc.subject is not None else None
        raise TypeCheckError(f"(checked on the mirror image) {exc.msg}", subj, exc.path) from None
    return _mirror_derivation(d)


def _mirror_derivation(d: Derivation) -> Derivation:
    f = F.dual_formula(d.formula) if d.formula is not None and not _has_meta(d.formula) else d.formula
    return Derivation(_RULE_MIRROR.get(d.rule, d.rule), _KIND_MIRROR.get(d.kind, d.kind),
                      mirror(d.subject), f, [_mirror_derivation(p) for p in d.premises], d.path)


def _has_meta(f: Formula) -> bool:
    match f:
        case F.Meta():
            return True
        case F.Atom() | F.CoAtom():
            return False
        case F.NotP(b) | F.NotN(b) | F.Neg(b):
            return _has_meta(b)
    return _has_meta(f.left) or _has_meta(f.right)


# ---------------------------------------------------------------- eta

def _replace_bullet(t: Node, a: str, z: str) -> Node:
    """Replace free occurrences of a^ (a covariable packed as a value) by the variable z."""
    if isinstance(t, Bullet) and t.body == CoVar(a):
        return Var(z)
    if isinstance(t, (Var, CoVar)) or ("c", a) not in fv(t):
        return t
    groups = []
    for binders, kids in t.groups():
        if ("c", a) in binders:
            groups.append((binders, kids))
        else:
            groups.append((binders, tuple(_replace_bullet(k, a, z) for k in kids)))
    return t.remake(groups)


def eta_contract_here(t: Node) -> Node | None:
    """One eta-contraction at the root of ``t``, or None."""
    match t:
        case Mu(a, Cmd(v, CoVar(b))) if a == b and ("c", a) not in fv(v):
            return v
        case MuT(x, Cmd(Val(Var(y)), e)) if x == y and ("v", x) not in fv(e):
            return e
        case MuTP(x1, x2, Cmd(Val(Pair(Var(y1), Var(y2))), e)) if (
                x1 == y1 and x2 == y2 and x1 != x2 and not {("v", x1), ("v", x2)} & fv(e)):
            return e
        case MuTS(x1, Cmd(Val(Inl(Var(y1))), e1), x2, Cmd(Val(Inr(Var(y2))), e2)) if (
                x1 == y1 and x2 == y2 and ("v", x1) not in fv(e1) and ("v", x2) not in fv(e2)
                and alpha_eq(e1, e2)):
            return e1
        case MuTB(a, Cmd(Val(Bullet(CoVar(b))), e)) if a == b and ("c", a) not in fv(e):
            return e
        # Derived: < val x | ~mu a^.c > = c{a^ := x} when a occurs in c only packed as a^.
        case Cmd(Val(Var(x)), MuTB(a, c)):
            z = fresh("z", all_names(t))
            c2 = _replace_bullet(c, a, z)
            if ("c", a) not in fv(c2):
                return subst(c2, {("v", z): Var(x)})
    return None


def eta_normalize(t: Node, limit: int = 100000) -> Node:
    """Contract eta-redexes bottom-up until none is left."""
    for _ in range(limit):
        t2 = _eta_pass(t)
        if t2 == t:
            return t
        t = t2
    raise RuntimeError("eta contraction did not stabilise")


def _eta_pass(t: Node) -> Node:
    if not isinstance(t, (Var, CoVar)):
        kids = children(t)
        new = [_eta_pass(k) for k in kids]
        if any(a is not b for a, b in zip(new, kids)):
            t = with_children(t, new)
    r = eta_contract_here(t)
    return r if r is not None else t


def check_eta(t1: Node, t2: Node) -> bool:
    return alpha_eq(eta_normalize(t1), eta_normalize(t2))


# ---------------------------------------------------------------- LKT reduction

def lkt_normalize(c: Node, fuel: int = 10000, strategy="leftmost"):
    """Reduce an LKT command by reducing its mirror image."""
    from .reduction import Result, TraceStep, normalize
    r = normalize(mirror(c), fuel=fuel, strategy=strategy)
    trace = [TraceStep(s.rule, s.position, mirror(s.before), mirror(s.after)) for s in r.trace]
    return Result(mirror(r.term), trace, r.status, r.loop_from)
