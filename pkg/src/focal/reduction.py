"""Cut elimination for the focalised calculus.

Two modes: *bundled* (default) contracts a redex and performs the generated
substitution at once; *unbundled* leaves an explicit substitution node that
is then pushed inwards by separate commutation steps.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
import random
from typing import Callable, Mapping

from . import formula as F
from .terms import (
    Bullet, Cmd, CoVar, Inl, Inr, Mu, MuT, MuTB, MuTP, MuTS, Node, Pair, Sub, Val, Var,
    canon, fresh, fv, positions, replace_at, subst, subterm_at,
)
from .typing import TypeCheckError, cut_formulas

NORMAL, FUEL, LOOP = "Normal", "FuelExhausted", "LoopDetected"


@dataclass(frozen=True)
class TraceStep:
    rule: str
    position: tuple
    before: Node
    after: Node

    def to_json(self) -> dict:
        return {"rule": self.rule, "position": list(self.position),
                "before": str(self.before), "after": str(self.after)}


@dataclass
class Result:
    term: Node
    trace: list
    status: str
    loop_from: int | None = None  # index in the trace of the first state of the cycle

    @property
    def steps(self) -> int:
        return len(self.trace)


# ---------------------------------------------------------------- redex detection

def root_rule(t: Node, bundled: bool = True) -> str | None:
    """Name of the rule applicable at the root of ``t``, if any."""
    match t:
        case Cmd(Mu(), _):
            return "control-mu"
        case Cmd(Val(_), MuT()):
            return "control-mu-tilde"
        case Cmd(Val(Bullet(_)), MuTB()):
            return "logical-not"
        case Cmd(Val(Pair()), MuTP()):
            return "logical-tensor"
        case Cmd(Val(Inl()), MuTS()):
            return "logical-plus-inl"
        case Cmd(Val(Inr()), MuTS()):
            return "logical-plus-inr"
        case Sub(body, _):
            if bundled:
                return "substitution"
            if isinstance(body, Sub):
                return None  # no rule composes substitutions: the inner one goes first
            return "commutation-" + _commute_name(body)
    return None


def _commute_name(body: Node) -> str:
    if isinstance(body, (Var, CoVar)):
        return "var"
    return type(body).__name__.lower()


def redexes(t: Node, bundled: bool = True) -> list[tuple[tuple, str]]:
    """All (position, rule) pairs in preorder."""
    out = []
    for p, s in positions(t):
        r = root_rule(s, bundled)
        if r:
            out.append((p, r))
    return out


def contract(t: Node, bundled: bool = True) -> Node:
    """Contract the redex at the root of ``t``."""
    mk = (lambda c, s: subst(c, s)) if bundled else _explicit
    match t:
        case Cmd(Mu(a, c), e):
            return mk(c, {("c", a): e})
        case Cmd(Val(V), MuT(x, c)):
            return mk(c, {("v", x): V})
        case Cmd(Val(Bullet(e)), MuTB(a, c)):
            return mk(c, {("c", a): e})
        case Cmd(Val(Pair(V1, V2)), MuTP(x1, x2, c)):
            return mk(c, {("v", x1): V1, ("v", x2): V2})
        case Cmd(Val(Inl(V)), MuTS(x1, c1, _, _)):
            return mk(c1, {("v", x1): V})
        case Cmd(Val(Inr(V)), MuTS(_, _, x2, c2)):
            return mk(c2, {("v", x2): V})
        case Sub(body, binds):
            if bundled:
                return subst(body, {(ns, n): v for ns, n, v in binds})
            return commute(t)
    raise ValueError(f"no redex at the root of {t}")


def _explicit(c: Node, s: dict) -> Node:
    return Sub(c, tuple((ns, n, v) for (ns, n), v in s.items()))


def commute(t: Sub) -> Node:
    """One propagation step of an explicit substitution."""
    body, binds = t.body, t.binds
    s = {(ns, n): v for ns, n, v in binds}
    if isinstance(body, (Var, CoVar)):
        key = ("v" if isinstance(body, Var) else "c", body.name)
        return s.get(key, body)
    if isinstance(body, Sub):
        raise ValueError("substitutions are not composed")
    rng = set()
    for v in s.values():
        rng |= fv(v)
    new_groups = []
    for binders, kids in body.groups():
        bset = set(binders)
        avoid = {n for _, n in rng} | {n for _, n in s} | {n for _, n in binders}
        for k in kids:
            avoid |= {n for _, n in fv(k)}
        ren, nb = {}, []
        for ns, n in binders:
            if (ns, n) in rng:
                n2 = fresh(n, avoid)
                avoid.add(n2)
                ren[(ns, n)] = Var(n2) if ns == "v" else CoVar(n2)
                nb.append((ns, n2))
            else:
                nb.append((ns, n))
        new_kids = []
        for k in kids:
            if ren:
                k = subst(k, ren)
            live = tuple((ns, n, v) for (ns, n), v in s.items() if (ns, n) not in bset and (ns, n) in fv(k))
            new_kids.append(Sub(k, live) if live else k)
        new_groups.append((tuple(nb), tuple(new_kids)))
    out = body.remake(new_groups)
    occ = body.occurrences()
    if occ:
        out = out.rename_occ({k: s[k].name for k in occ if k in s})
    return out


# ---------------------------------------------------------------- strategies

@dataclass(frozen=True)
class Strategy:
    kind: str = "leftmost"  # leftmost | rightmost | random | position
    seed: int = 0
    path: tuple = ()

    @staticmethod
    def parse(text: str) -> "Strategy":
        """'leftmost', 'rightmost', 'random', 'random:7', 'position:0.1.0'."""
        name, _, arg = text.partition(":")
        if name in ("leftmost", "rightmost"):
            return Strategy(name)
        if name == "random":
            return Strategy("random", int(arg or 0))
        if name == "position":
            return Strategy("position", path=tuple(int(i) for i in arg.split(".") if i != ""))
        raise ValueError(f"unknown strategy {text!r}")


def _chooser(strategy: Strategy):
    if strategy.kind == "random":
        rng = random.Random(strategy.seed)
        return lambda rs: rs[rng.randrange(len(rs))]
    if strategy.kind == "rightmost":
        return lambda rs: rs[-1]
    return lambda rs: rs[0]


def step(c: Node, strategy: Strategy | str = "leftmost", bundled: bool = True,
         _choose: Callable | None = None):
    """Contract one redex; returns (term, TraceStep) or None when normal."""
    if isinstance(strategy, str):
        strategy = Strategy.parse(strategy)
    if strategy.kind == "position":
        sub = subterm_at(c, strategy.path)
        rule = root_rule(sub, bundled)
        if rule is None:
            raise ValueError(f"no redex at position {'.'.join(map(str, strategy.path)) or 'root'}")
        new = replace_at(c, strategy.path, contract(sub, bundled))
        return new, TraceStep(rule, strategy.path, c, new)
    rs = redexes(c, bundled)
    if not rs:
        return None
    p, rule = (_choose or _chooser(strategy))(rs)
    new = replace_at(c, p, contract(subterm_at(c, p), bundled))
    return new, TraceStep(rule, p, c, new)


def normalize(c: Node, fuel: int = 10000, strategy: Strategy | str = "leftmost",
              bundled: bool = True, window: int = 64) -> Result:
    if isinstance(strategy, str):
        strategy = Strategy.parse(strategy)
    if strategy.kind == "position":
        raise ValueError("normalize needs a global strategy")
    choose = _chooser(strategy)
    trace: list[TraceStep] = []
    hist: deque = deque()  # (canonical form, state index), at most `window` entries
    live: dict = {}
    k = canon(c)
    hist.append((k, 0))
    live[k] = 0
    for i in range(1, fuel + 1):
        r = step(c, strategy, bundled, choose)
        if r is None:
            return Result(c, trace, NORMAL)
        c, st = r
        trace.append(st)
        k = canon(c)
        if k in live:
            return Result(c, trace, LOOP, live[k])
        hist.append((k, i))
        live[k] = i
        if len(hist) > window:
            old, j = hist.popleft()
            if live.get(old) == j:
                del live[old]
    return Result(c, trace, FUEL if redexes(c, bundled) else NORMAL)


def replay(start: Node, trace, bundled: bool = True) -> Node:
    """Re-apply a trace (rule names and positions) and check every step."""
    t = start
    for st in trace:
        rule = st.rule if isinstance(st, TraceStep) else st["rule"]
        pos = tuple(st.position if isinstance(st, TraceStep) else st["position"])
        sub = subterm_at(t, pos)
        got = root_rule(sub, bundled)
        if got != rule:
            raise ValueError(f"trace mismatch at {pos}: expected {rule}, found {got}")
        t = replace_at(t, pos, contract(sub, bundled))
    return t


# ---------------------------------------------------------------- weak normalisation

@dataclass
class WNStep:
    rule: str
    position: tuple
    degree: int
    before: Node
    after: Node
    measure_before: list
    measure_after: list


def _is_mu_redex(t: Node) -> bool:
    return isinstance(t, Cmd) and isinstance(t.left, Mu)


def _has_mu_redex(t: Node) -> bool:
    return any(_is_mu_redex(s) for _, s in positions(t))


def multiset_less(a, b) -> bool:
    """Dershowitz-Manna: a < b in the multiset extension of < on integers."""
    ca, cb = Counter(a), Counter(b)
    da, db = ca - cb, cb - ca
    if not db:
        return False
    return all(any(y > x for y in db) for x in da)


def redex_degrees(c: Node, gamma: Mapping, delta: Mapping) -> dict[tuple, int]:
    """Position of every (non-substitution) redex -> size of its cut formula."""
    cuts = cut_formulas(c, gamma, delta)
    out = {}
    for p, rule in redexes(c):
        if rule == "substitution":
            continue
        out[p] = F.size(cuts[p])
    return out


def _augmented_hook(t: Node, s: dict, rng) -> Node | None:
    """Packaged substitution: < val x | binder > fires when x receives a matching value."""
    if not (isinstance(t, Cmd) and isinstance(t.left, Val) and isinstance(t.left.body, Var)):
        return None
    key = ("v", t.left.body.name)
    if key not in s:
        return None
    V, e = s[key], t.right
    match V, e:
        case Bullet(e2), MuTB(a, c):
            return subst(c, {**s, ("c", a): e2}, _augmented_hook)
        case Pair(V1, V2), MuTP(x1, x2, c):
            s2 = {k: v for k, v in s.items()}
            s2[("v", x1)], s2[("v", x2)] = V1, V2
            return subst(c, s2, _augmented_hook)
        case Inl(V1), MuTS(x1, c1, _, _):
            return subst(c1, {**s, ("v", x1): V1}, _augmented_hook)
        case Inr(V2), MuTS(_, _, x2, c2):
            return subst(c2, {**s, ("v", x2): V2}, _augmented_hook)
    return None


def packaged_contract(t: Node) -> Node:
    match t:
        case Cmd(Val(V), MuT(x, c)):
            return subst(c, {("v", x): V}, _augmented_hook)
        case Cmd(Val(Bullet(e)), MuTB(a, c)):
            return subst(c, {("c", a): e}, _augmented_hook)
        case Cmd(Val(Pair(V1, V2)), MuTP(x1, x2, c)):
            return subst(c, {("v", x1): V1, ("v", x2): V2}, _augmented_hook)
        case Cmd(Val(Inl(V)), MuTS(x1, c1, _, _)):
            return subst(c1, {("v", x1): V}, _augmented_hook)
        case Cmd(Val(Inr(V)), MuTS(_, _, x2, c2)):
            return subst(c2, {("v", x2): V}, _augmented_hook)
    raise ValueError(f"not a packaged redex: {t}")


def normalize_wn(c: Node, gamma: Mapping | None = None, delta: Mapping | None = None,
                 limit: int = 100000):
    """Degree-directed normalisation of a typed command.

    Returns (normal form, list of WNStep).  Every packaged step is checked to
    decrease the multiset of redex degrees.
    """
    gamma, delta = dict(gamma or {}), dict(delta or {})
    try:
        cut_formulas(c, gamma, delta)
    except TypeCheckError as exc:
        raise TypeCheckError(f"normalize_wn needs a typed command: {exc.msg}", exc.subject) from None
    trace: list = []
    # Phase 1: every mu-redex, innermost first.
    while True:
        inner = [p for p, s in positions(c) if _is_mu_redex(s) and not any(
            _is_mu_redex(x) for _, x in list(positions(s))[1:])]
        if not inner:
            break
        p = inner[0]
        before = c
        c = replace_at(c, p, contract(subterm_at(c, p)))
        trace.append(WNStep("control-mu", p, 0, before, c, [], []))
        if len(trace) > limit:
            raise RuntimeError("mu elimination did not terminate")
    if any(isinstance(s, Sub) for _, s in positions(c)):
        c = normalize(c, fuel=limit).term  # pending explicit substitutions are executed first
    # Phase 2: maximal degree, no subredex of the same degree.
    for _ in range(limit):
        degs = redex_degrees(c, gamma, delta)
        if not degs:
            return c, trace
        top = max(degs.values())
        cands = [p for p in sorted(degs) if degs[p] == top and not any(
            q != p and q[:len(p)] == p and degs[q] >= top for q in degs)]
        p = min(cands, key=_preorder_key(c))
        before = c
        new = replace_at(c, p, packaged_contract(subterm_at(c, p)))
        if _has_mu_redex(new):
            raise AssertionError("a mu-redex was created in the second phase")
        after = list(redex_degrees(new, gamma, delta).values())
        measure = sorted(degs.values(), reverse=True)
        if not multiset_less(after, measure):
            raise AssertionError(f"degree multiset did not decrease: {measure} -> {sorted(after, reverse=True)}")
        trace.append(WNStep(root_rule(subterm_at(c, p)), p, top, before, new, measure,
                            sorted(after, reverse=True)))
        c = new
    raise RuntimeError("weak normalisation exceeded its step bound")


def _preorder_key(c: Node):
    order = {p: i for i, (p, _) in enumerate(positions(c))}
    return lambda p: order[p]


# ---------------------------------------------------------------- normal forms

NOT_NORMAL = "NotNormal"


def classify_normal(c: Node) -> str:
    """Shape of a normal command, or NotNormal."""
    if redexes(c):
        return NOT_NORMAL
    return _shape(c)


def _shape(c: Node) -> str:
    match c:
        case Cmd(Val(V), CoVar()):
            return "val-covar" if _values_normal(V) else NOT_NORMAL
        case Cmd(Val(Var()), MuTB(_, body)):
            return "neg-left" if _shape(body) != NOT_NORMAL else NOT_NORMAL
        case Cmd(Val(Var()), MuTP(_, _, body)):
            return "tensor-left" if _shape(body) != NOT_NORMAL else NOT_NORMAL
        case Cmd(Val(Var()), MuTS(_, c1, _, c2)):
            ok = _shape(c1) != NOT_NORMAL and _shape(c2) != NOT_NORMAL
            return "plus-left" if ok else NOT_NORMAL
    return NOT_NORMAL


def _values_normal(V: Node) -> bool:
    match V:
        case Var():
            return True
        case Pair(a, b):
            return _values_normal(a) and _values_normal(b)
        case Inl(b) | Inr(b):
            return _values_normal(b)
        case Bullet(e):
            return _context_normal(e)
    return False


def _context_normal(e: Node) -> bool:
    match e:
        case CoVar():
            return True
        case MuT(_, c) | MuTB(_, c) | MuTP(_, _, c):
            return _shape(c) != NOT_NORMAL
        case MuTS(_, c1, _, c2):
            return _shape(c1) != NOT_NORMAL and _shape(c2) != NOT_NORMAL
    return False
