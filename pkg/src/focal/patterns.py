"""Patterns p and counterpatterns q, linear trees over leaves x and a^."""
from __future__ import annotations

from dataclasses import dataclass


class Pat:
    __slots__ = ()

    def __str__(self) -> str:
        return show_pat(self)


@dataclass(frozen=True)
class PVar(Pat):
    name: str


@dataclass(frozen=True)
class PBul(Pat):
    name: str


@dataclass(frozen=True)
class PPair(Pat):
    left: Pat
    right: Pat


@dataclass(frozen=True)
class PInl(Pat):
    body: Pat


@dataclass(frozen=True)
class PInr(Pat):
    body: Pat


class CoPat:
    __slots__ = ()

    def __str__(self) -> str:
        return show_copat(self)


@dataclass(frozen=True)
class QVar(CoPat):
    name: str


@dataclass(frozen=True)
class QBul(CoPat):
    name: str


@dataclass(frozen=True)
class QPair(CoPat):
    left: CoPat
    right: CoPat


@dataclass(frozen=True)
class QCopair(CoPat):
    left: CoPat
    right: CoPat


def leaf_key(leaf) -> tuple[str, str]:
    """Namespace-qualified name of a leaf: x leaves are variables, a^ leaves covariables."""
    if isinstance(leaf, (PVar, QVar)):
        return ("v", leaf.name)
    return ("c", leaf.name)


def pat_leaves(p: Pat) -> list[Pat]:
    match p:
        case PVar() | PBul():
            return [p]
        case PPair(a, b):
            return pat_leaves(a) + pat_leaves(b)
        case PInl(b) | PInr(b):
            return pat_leaves(b)
    raise TypeError(p)


def copat_leaves(q: CoPat) -> list[CoPat]:
    """Distinct leaves in first-occurrence order (copair sides may share names)."""
    out: list[CoPat] = []
    seen = set()

    def go(q):
        match q:
            case QVar() | QBul():
                if q not in seen:
                    seen.add(q)
                    out.append(q)
            case QPair(a, b) | QCopair(a, b):
                go(a)
                go(b)

    go(q)
    return out


def pat_linear(p: Pat) -> bool:
    keys = [leaf_key(l) for l in pat_leaves(p)]
    return len(keys) == len(set(keys))


def copat_linear(q: CoPat) -> bool:
    """Pairs need disjoint sides; copair sides may reuse names."""
    match q:
        case QVar() | QBul():
            return True
        case QPair(a, b):
            ka = {leaf_key(l) for l in copat_leaves(a)}
            kb = {leaf_key(l) for l in copat_leaves(b)}
            return not (ka & kb) and copat_linear(a) and copat_linear(b)
        case QCopair(a, b):
            return copat_linear(a) and copat_linear(b)
    raise TypeError(q)


def pat_shape(p: Pat):
    """Pattern with leaf names erased."""
    match p:
        case PVar():
            return "x"
        case PBul():
            return "a"
        case PPair(a, b):
            return ("pair", pat_shape(a), pat_shape(b))
        case PInl(b):
            return ("inl", pat_shape(b))
        case PInr(b):
            return ("inr", pat_shape(b))
    raise TypeError(p)


def pat_choices(p: Pat) -> tuple[int, ...]:
    """In-order inl/inr choices (0 for inl, 1 for inr); the canonical field key."""
    match p:
        case PVar() | PBul():
            return ()
        case PPair(a, b):
            return pat_choices(a) + pat_choices(b)
        case PInl(b):
            return (0,) + pat_choices(b)
        case PInr(b):
            return (1,) + pat_choices(b)
    raise TypeError(p)


def rename_pat(p: Pat, ren: dict[tuple[str, str], str]) -> Pat:
    match p:
        case PVar(n):
            return PVar(ren.get(("v", n), n))
        case PBul(n):
            return PBul(ren.get(("c", n), n))
        case PPair(a, b):
            return PPair(rename_pat(a, ren), rename_pat(b, ren))
        case PInl(b):
            return PInl(rename_pat(b, ren))
        case PInr(b):
            return PInr(rename_pat(b, ren))
    raise TypeError(p)


def rename_copat(q: CoPat, ren: dict[tuple[str, str], str]) -> CoPat:
    match q:
        case QVar(n):
            return QVar(ren.get(("v", n), n))
        case QBul(n):
            return QBul(ren.get(("c", n), n))
        case QPair(a, b):
            return QPair(rename_copat(a, ren), rename_copat(b, ren))
        case QCopair(a, b):
            return QCopair(rename_copat(a, ren), rename_copat(b, ren))
    raise TypeError(q)


def orthogonal(q: CoPat, p: Pat) -> bool:
    match q, p:
        case QVar(a), PVar(b):
            return a == b
        case QBul(a), PBul(b):
            return a == b
        case QPair(q1, q2), PPair(p1, p2):
            return orthogonal(q1, p1) and orthogonal(q2, p2)
        case QCopair(q1, _), PInl(p1):
            return orthogonal(q1, p1)
        case QCopair(_, q2), PInr(p2):
            return orthogonal(q2, p2)
    return False


def patterns_of(q: CoPat) -> list[Pat]:
    """All p with q orthogonal to p, ordered by their inl/inr choice sequence."""
    match q:
        case QVar(n):
            return [PVar(n)]
        case QBul(n):
            return [PBul(n)]
        case QPair(a, b):
            return [PPair(x, y) for x in patterns_of(a) for y in patterns_of(b)]
        case QCopair(a, b):
            return [PInl(x) for x in patterns_of(a)] + [PInr(y) for y in patterns_of(b)]
    raise TypeError(q)


def show_pat(p: Pat) -> str:
    match p:
        case PVar(n):
            return n
        case PBul(n):
            return n + "^"
        case PPair(a, b):
            return f"({show_pat(a)},{show_pat(b)})"
        case PInl(b):
            return f"inl({show_pat(b)})"
        case PInr(b):
            return f"inr({show_pat(b)})"
    raise TypeError(p)


def show_copat(q: CoPat) -> str:
    match q:
        case QVar(n):
            return n
        case QBul(n):
            return n + "^"
        case QPair(a, b):
            return f"({show_copat(a)},{show_copat(b)})"
        case QCopair(a, b):
            return f"[{show_copat(a)},{show_copat(b)}]"
    raise TypeError(q)
