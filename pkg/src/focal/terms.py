"""Term representation shared by every calculus in the package.

Each node class declares its binder structure as a list of *groups*: a group
is a tuple of bound names (namespace-qualified: ``("v", x)`` for variables,
``("c", a)`` for covariables) together with the children those names scope
over.  Free names, capture-avoiding substitution, alpha-equivalence,
positions and sizes are all written once against that interface.
"""
from __future__ import annotations

from dataclasses import dataclass
import re
from typing import Callable, Iterable, Mapping

from .patterns import (
    CoPat, Pat, copat_leaves, leaf_key, pat_leaves, rename_copat, rename_pat,
)

Key = tuple[str, str]


class Node:
    """Base class; subclasses are frozen dataclasses."""

    # ((binder (field, ns) pairs), (child fields)) per group
    _SHAPE: tuple = ()

    def groups(self) -> list[tuple[tuple[Key, ...], tuple["Node", ...]]]:
        out = []
        for binders, kids in self._SHAPE:
            out.append((tuple((ns, getattr(self, f)) for f, ns in binders),
                        tuple(getattr(self, k) for k in kids)))
        return out

    def remake(self, groups) -> "Node":
        kw = {}
        for (binders, kids), (nb, nk) in zip(self._SHAPE, groups):
            for (f, _), (_, name) in zip(binders, nb):
                kw[f] = name
            for k, v in zip(kids, nk):
                kw[k] = v
        return type(self)(**kw)

    def occurrences(self) -> tuple[Key, ...]:
        """Names used by this node itself outside any child (e.g. [b]M)."""
        return ()

    def rename_occ(self, ren: Mapping[Key, str]) -> "Node":
        return self

    def __str__(self) -> str:
        from .printer import show
        return show(self)


def _node(cls):
    return dataclass(frozen=True)(cls)


# ----------------------------------------------------------------- leaves

@_node
class Var(Node):
    name: str


@_node
class CoVar(Node):
    name: str


def leaf(key: Key) -> Node:
    ns, name = key
    return Var(name) if ns == "v" else CoVar(name)


# ----------------------------------------------------------------- sequent terms

@_node
class Cmd(Node):
    left: Node
    right: Node
    _SHAPE = (((), ("left", "right")),)


@_node
class Val(Node):
    body: Node
    _SHAPE = (((), ("body",)),)


@_node
class Mu(Node):
    """mu a.c (binds a covariable)."""
    name: str
    body: Node
    _SHAPE = (((("name", "c"),), ("body",)),)


@_node
class MuT(Node):
    """~mu x.c (binds a variable)."""
    name: str
    body: Node
    _SHAPE = (((("name", "v"),), ("body",)),)


@_node
class MuTB(Node):
    """~mu a^.c : the left rule for negation."""
    name: str
    body: Node
    _SHAPE = (((("name", "c"),), ("body",)),)


@_node
class MuB(Node):
    """mu x^.c : the mirror of MuTB in the call-by-name calculus."""
    name: str
    body: Node
    _SHAPE = (((("name", "v"),), ("body",)),)


@_node
class MuTP(Node):
    x1: str
    x2: str
    body: Node
    _SHAPE = (((("x1", "v"), ("x2", "v")), ("body",)),)


@_node
class MuP(Node):
    a1: str
    a2: str
    body: Node
    _SHAPE = (((("a1", "c"), ("a2", "c")), ("body",)),)


@_node
class MuTS(Node):
    x1: str
    c1: Node
    x2: str
    c2: Node
    _SHAPE = (((("x1", "v"),), ("c1",)), ((("x2", "v"),), ("c2",)))


@_node
class MuS(Node):
    a1: str
    c1: Node
    a2: str
    c2: Node
    _SHAPE = (((("a1", "c"),), ("c1",)), ((("a2", "c"),), ("c2",)))


@_node
class Pair(Node):
    left: Node
    right: Node
    _SHAPE = (((), ("left", "right")),)


@_node
class Inl(Node):
    body: Node
    _SHAPE = (((), ("body",)),)


@_node
class Inr(Node):
    body: Node
    _SHAPE = (((), ("body",)),)


@_node
class Bullet(Node):
    """e^ : a context packed as a value (or an expression, in the mirror)."""
    body: Node
    _SHAPE = (((), ("body",)),)


@_node
class Down(Node):
    """Dereliction of the polarised subsystem."""
    body: Node
    _SHAPE = (((), ("body",)),)


@_node
class Sub(Node):
    """Explicit substitution t[x:=V, a:=e]; binds are (ns, name, term)."""
    body: Node
    binds: tuple

    def groups(self):
        return [(tuple((ns, n) for ns, n, _ in self.binds), (self.body,)),
                ((), tuple(t for _, _, t in self.binds))]

    def remake(self, groups):
        (nb, (body,)), (_, terms) = groups
        return Sub(body, tuple((ns, n, t) for (ns, n), t in zip(nb, terms)))


# ----------------------------------------------------------------- lambda / NJ

@_node
class Lam(Node):
    name: str
    body: Node
    _SHAPE = (((("name", "v"),), ("body",)),)


@_node
class LamP(Node):
    """\\(x1,x2).c"""
    x1: str
    x2: str
    body: Node
    _SHAPE = (((("x1", "v"), ("x2", "v")), ("body",)),)


@_node
class LamCase(Node):
    """\\z.case z of inl(x1) -> c1 | inr(x2) -> c2"""
    z: str
    x1: str
    c1: Node
    x2: str
    c2: Node
    _SHAPE = (((("z", "v"),), ()), ((("x1", "v"),), ("c1",)), ((("x2", "v"),), ("c2",)))


@_node
class App(Node):
    fun: Node
    arg: Node
    _SHAPE = (((), ("fun", "arg")),)


@_node
class Named(Node):
    """[b]M : a named term of the lambda-mu source language."""
    name: str
    body: Node
    _SHAPE = (((), ("body",)),)

    def occurrences(self):
        return (("c", self.name),)

    def rename_occ(self, ren):
        return Named(ren.get(("c", self.name), self.name), self.body)


@_node
class Control(Node):
    body: Node
    _SHAPE = (((), ("body",)),)


@_node
class Reified(Node):
    """A captured call-by-name stack E, usable as a term."""
    stack: tuple
    _SHAPE = ()

    def groups(self):
        return [((), tuple(self.stack))]

    def remake(self, groups):
        return Reified(tuple(groups[0][1]))


@_node
class Dot(Node):
    """V . e : an applicative context of the value calculus."""
    head: Node
    tail: Node
    _SHAPE = (((), ("head", "tail")),)


# ----------------------------------------------------------------- synthetic

@_node
class SVal(Node):
    """p{i:=V_i}: a pattern with one filling per leaf, in leaf order."""
    pat: Pat
    fills: tuple

    def groups(self):
        return [(tuple(leaf_key(l) for l in pat_leaves(self.pat)), ()),
                ((), tuple(self.fills))]

    def remake(self, groups):
        (nb, _), (_, fills) = groups
        old = [leaf_key(l) for l in pat_leaves(self.pat)]
        ren = {o: n for o, (_, n) in zip(old, nb)}
        return SVal(rename_pat(self.pat, ren), tuple(fills))


@_node
class MuQ(Node):
    """~mu q.{p -> c_p}: a record with one field per pattern orthogonal to q."""
    q: CoPat
    fields: tuple  # of (Pat, Node)

    def groups(self):
        out = [(tuple(leaf_key(l) for l in copat_leaves(self.q)), ())]
        for p, c in self.fields:
            out.append((tuple(leaf_key(l) for l in pat_leaves(p)), (c,)))
        return out

    def remake(self, groups):
        (qb, _), *rest = groups
        qold = [leaf_key(l) for l in copat_leaves(self.q)]
        q = rename_copat(self.q, {o: n for o, (_, n) in zip(qold, qb)})
        fields = []
        for (p, _), (pb, (c,)) in zip(self.fields, rest):
            pold = [leaf_key(l) for l in pat_leaves(p)]
            fields.append((rename_pat(p, {o: n for o, (_, n) in zip(pold, pb)}), c))
        return MuQ(q, tuple(fields))


@_node
class MuQC(Node):
    """~mu q.C of the intermediate system, C a command tree."""
    q: CoPat
    tree: Node

    def groups(self):
        return [(tuple(leaf_key(l) for l in copat_leaves(self.q)), (self.tree,))]

    def remake(self, groups):
        ((nb, (tree,)),) = groups
        old = [leaf_key(l) for l in copat_leaves(self.q)]
        return MuQC(rename_copat(self.q, {o: n for o, (_, n) in zip(old, nb)}), tree)


@_node
class CoPairC(Node):
    """[C1 |q1,q2| C2]: a copairing node of a command tree."""
    left: Node
    q1: CoPat
    q2: CoPat
    right: Node
    _SHAPE = (((), ("left", "right")),)

    def remake(self, groups):
        ((_, (l, r)),) = groups
        return CoPairC(l, self.q1, self.q2, r)

    def occurrences(self):
        return tuple(leaf_key(l) for l in copat_leaves(self.q1) + copat_leaves(self.q2))

    def rename_occ(self, ren):
        return CoPairC(self.left, rename_copat(self.q1, ren), rename_copat(self.q2, ren), self.right)


# ----------------------------------------------------------------- generic traversal

def children(t: Node) -> list[Node]:
    if isinstance(t, (Var, CoVar)):
        return []
    return [k for _, kids in t.groups() for k in kids]


def with_children(t: Node, new: list[Node]) -> Node:
    it = iter(new)
    groups = [(b, tuple(next(it) for _ in kids)) for b, kids in t.groups()]
    return t.remake(groups)


def subterm_at(t: Node, path: Iterable[int]) -> Node:
    for i in path:
        t = children(t)[i]
    return t


def replace_at(t: Node, path: tuple[int, ...], new: Node) -> Node:
    if not path:
        return new
    kids = children(t)
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(t, kids)


def positions(t: Node, prefix: tuple[int, ...] = ()) -> Iterable[tuple[tuple[int, ...], Node]]:
    """Preorder walk yielding (path, subterm)."""
    yield prefix, t
    for i, k in enumerate(children(t)):
        yield from positions(k, prefix + (i,))


def size(t: Node) -> int:
    return 1 + sum(size(k) for k in children(t))


def fv(t: Node) -> frozenset[Key]:
    cached = t.__dict__.get("_fv")
    if cached is not None:
        return cached
    if isinstance(t, Var):
        out = frozenset({("v", t.name)})
    elif isinstance(t, CoVar):
        out = frozenset({("c", t.name)})
    else:
        acc = set(t.occurrences())
        for binders, kids in t.groups():
            b = set(binders)
            for k in kids:
                acc |= fv(k) - b
        out = frozenset(acc)
    object.__setattr__(t, "_fv", out)
    return out


def free_names(t: Node) -> tuple[frozenset[str], frozenset[str]]:
    f = fv(t)
    return (frozenset(n for ns, n in f if ns == "v"), frozenset(n for ns, n in f if ns == "c"))


def all_names(t: Node) -> set[str]:
    """Every name mentioned anywhere, bound or free."""
    out = {n for _, n in fv(t)}
    if isinstance(t, (Var, CoVar)):
        return out
    for binders, kids in t.groups():
        out |= {n for _, n in binders}
        for k in kids:
            out |= all_names(k)
    return out


_SUFFIX = re.compile(r"^(.*?)(\d+)$")


def fresh(base: str, avoid) -> str:
    """Deterministic fresh name: strip a numeric suffix, then count upwards."""
    if base not in avoid:
        return base
    m = _SUFFIX.match(base)
    stem = m.group(1) if m and m.group(1) else base
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


# ----------------------------------------------------------------- substitution

Hook = Callable[[Node, dict, frozenset], "Node | None"]


def subst(t: Node, s, hook: Hook | None = None) -> Node:
    """Capture-avoiding simultaneous substitution.

    ``s`` maps keys ``("v", x)`` / ``("c", a)`` to terms, or is a
    :class:`Subst`.  ``hook`` may intercept non-leaf nodes (used by the
    augmented substitution of the weak-normalisation procedure).
    """
    if isinstance(s, Subst):
        s = s.as_dict()
    if not s:
        return t
    rng = frozenset().union(*(fv(v) for v in s.values()))
    return _subst(t, dict(s), rng, hook)


def _subst(t: Node, s: dict, rng: frozenset, hook: Hook | None) -> Node:
    if isinstance(t, Var):
        return s.get(("v", t.name), t)
    if isinstance(t, CoVar):
        return s.get(("c", t.name), t)
    if hook is not None:
        r = hook(t, s, rng)
        if r is not None:
            return r
    ft = fv(t)
    if not any(k in ft for k in s):
        return t
    occ = t.occurrences()
    if occ:
        ren = {}
        for k in occ:
            if k in s:
                tgt = s[k]
                if not isinstance(tgt, (Var, CoVar)):
                    raise TypeError(f"cannot substitute a compound term for the name {k[1]}")
                ren[k] = tgt.name
        t = t.rename_occ(ren)
    new_groups = []
    for binders, kids in t.groups():
        bset = set(binders)
        s2 = {k: v for k, v in s.items() if k not in bset}
        live = [k for k in kids if any(key in fv(k) for key in s2)]
        if not s2 or not live:
            new_groups.append((binders, kids))
            continue
        avoid = {n for _, n in rng} | {n for _, n in s2}
        for k in kids:
            avoid |= {n for _, n in fv(k)}
        avoid |= {n for _, n in binders}
        nb = []
        ren: dict = {}
        for ns, n in binders:
            if (ns, n) in rng:
                n2 = fresh(n, avoid)
                avoid.add(n2)
                ren[(ns, n)] = leaf((ns, n2))
                nb.append((ns, n2))
            else:
                nb.append((ns, n))
        s3 = {**s2, **ren}
        rng3 = rng | frozenset(nb)
        new_groups.append((tuple(nb), tuple(_subst(k, s3, rng3, hook) for k in kids)))
    return t.remake(new_groups)


def rename(t: Node, ren: Mapping[Key, str]) -> Node:
    return subst(t, {k: leaf((k[0], n)) for k, n in ren.items()})


class Subst:
    """Ordered list of bindings; each name bound at most once."""

    def __init__(self, binds: Iterable[tuple[str, str, Node]]):
        self.binds = tuple(binds)
        keys = [(ns, n) for ns, n, _ in self.binds]
        if len(keys) != len(set(keys)):
            raise ValueError("a name is bound twice in the substitution")
        for ns, _, _ in self.binds:
            if ns not in ("v", "c"):
                raise ValueError(f"bad namespace {ns!r}")

    def as_dict(self) -> dict:
        return {(ns, n): t for ns, n, t in self.binds}

    def __iter__(self):
        return iter(self.binds)

    def __len__(self):
        return len(self.binds)


# ----------------------------------------------------------------- alpha-equivalence

def canon(t: Node) -> Node:
    """Rename every bound name to a positional canonical name.

    Record fields are also sorted by their inl/inr choice sequence so that
    records compare by field set.
    """
    counter = [0]

    def go(t: Node, env: dict) -> Node:
        if isinstance(t, Var):
            return Var(env.get(("v", t.name), t.name))
        if isinstance(t, CoVar):
            return CoVar(env.get(("c", t.name), t.name))
        occ = t.occurrences()
        if occ:
            t = t.rename_occ({k: env[k] for k in occ if k in env})
        if isinstance(t, MuQ):
            from .patterns import pat_choices
            t = MuQ(t.q, tuple(sorted(t.fields, key=lambda f: pat_choices(f[0]))))
        new_groups = []
        for binders, kids in t.groups():
            env2 = dict(env)
            nb = []
            for ns, n in binders:
                cn = f"%{counter[0]}"
                counter[0] += 1
                env2[(ns, n)] = cn
                nb.append((ns, cn))
            new_groups.append((tuple(nb), tuple(go(k, env2) for k in kids)))
        return t.remake(new_groups)

    return go(t, {})


def alpha_eq(t1: Node, t2: Node) -> bool:
    return canon(t1) == canon(t2)
