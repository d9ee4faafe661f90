"""Formulas: positive P, negative N (De Morgan duals), raw LK formulas A.

Also hosts a small unifier over formulas with metavariables, used by the
type inference of every calculus in the package.
"""
from __future__ import annotations

from dataclasses import dataclass
import itertools


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return show_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Tensor(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Plus(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class NotP(Formula):
    body: Formula


@dataclass(frozen=True)
class CoAtom(Formula):
    name: str


@dataclass(frozen=True)
class Par(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class With(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class NotN(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Neg(Formula):
    body: Formula


@dataclass(frozen=True)
class Arrow(Formula):
    """Simple function type of the source lambda-calculi."""
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Meta(Formula):
    """Unification variable; never appears in a finished judgement."""
    ident: int


_BINARY = (Tensor, Plus, Par, With, And, Or, Arrow)
_UNARY = (NotP, NotN, Neg)


def size(f: Formula) -> int:
    match f:
        case Atom() | CoAtom() | Meta():
            return 1
        case NotP(b) | NotN(b) | Neg(b):
            return 1 + size(b)
        case _:
            return 1 + size(f.left) + size(f.right)


def is_positive(f: Formula) -> bool:
    match f:
        case Atom():
            return True
        case Tensor(a, b) | Plus(a, b):
            return is_positive(a) and is_positive(b)
        case NotP(b):
            return is_positive(b)
    return False


def is_negative(f: Formula) -> bool:
    match f:
        case CoAtom():
            return True
        case Par(a, b) | With(a, b):
            return is_negative(a) and is_negative(b)
        case NotN(b):
            return is_negative(b)
    return False


def is_lk(f: Formula) -> bool:
    match f:
        case Atom():
            return True
        case And(a, b) | Or(a, b):
            return is_lk(a) and is_lk(b)
        case Neg(b):
            return is_lk(b)
    return False


def is_atomic(f: Formula) -> bool:
    return isinstance(f, (Atom, CoAtom))


def dual_formula(f: Formula) -> Formula:
    match f:
        case Atom(n):
            return CoAtom(n)
        case CoAtom(n):
            return Atom(n)
        case Tensor(a, b):
            return Par(dual_formula(a), dual_formula(b))
        case Par(a, b):
            return Tensor(dual_formula(a), dual_formula(b))
        case Plus(a, b):
            return With(dual_formula(a), dual_formula(b))
        case With(a, b):
            return Plus(dual_formula(a), dual_formula(b))
        case NotP(b):
            return NotN(dual_formula(b))
        case NotN(b):
            return NotP(dual_formula(b))
    raise ValueError(f"no De Morgan dual for {show_formula(f)}")


def lk_to_positive(f: Formula) -> Formula:
    """And/Or/Neg renamed to Tensor/Plus/NotP."""
    match f:
        case Atom():
            return f
        case And(a, b):
            return Tensor(lk_to_positive(a), lk_to_positive(b))
        case Or(a, b):
            return Plus(lk_to_positive(a), lk_to_positive(b))
        case Neg(b):
            return NotP(lk_to_positive(b))
        case Meta():
            return f
    raise ValueError(f"not a raw LK formula: {show_formula(f)}")


def atoms(f: Formula) -> set[str]:
    match f:
        case Atom(n) | CoAtom(n):
            return {n}
        case Meta():
            return set()
        case NotP(b) | NotN(b) | Neg(b):
            return atoms(b)
        case _:
            return atoms(f.left) | atoms(f.right)


# ---------------------------------------------------------------- printing

_OPS = {Tensor: "*", Plus: "+", Par: "par", With: "&", And: "/\\", Or: "\\/", Arrow: "->"}


def show_formula(f: Formula) -> str:
    match f:
        case Atom(n):
            return n
        case CoAtom(n):
            return "-" + n
        case Meta(i):
            return f"?{i}"
        case NotP(b):
            return "~" + _wrap(b)
        case NotN(b):
            return "~-" + _wrap(b)
        case Neg(b):
            return "not " + _wrap(b)
    return f"{_wrap(f.left)} {_OPS[type(f)]} {_wrap(f.right)}"


def _wrap(f: Formula) -> str:
    s = show_formula(f)
    return f"({s})" if isinstance(f, _BINARY) else s


# ---------------------------------------------------------------- unification

class UnifyError(Exception):
    pass


class Unifier:
    """Union-find free substitution on Meta variables, with occurs check."""

    def __init__(self) -> None:
        self.binding: dict[int, Formula] = {}
        self._ids = itertools.count()

    def fresh(self) -> Meta:
        return Meta(next(self._ids))

    def walk(self, f: Formula) -> Formula:
        while isinstance(f, Meta) and f.ident in self.binding:
            f = self.binding[f.ident]
        return f

    def resolve(self, f: Formula) -> Formula:
        f = self.walk(f)
        match f:
            case Atom() | CoAtom() | Meta():
                return f
            case NotP(b):
                return NotP(self.resolve(b))
            case NotN(b):
                return NotN(self.resolve(b))
            case Neg(b):
                return Neg(self.resolve(b))
        return type(f)(self.resolve(f.left), self.resolve(f.right))

    def _occurs(self, i: int, f: Formula) -> bool:
        f = self.walk(f)
        match f:
            case Meta(j):
                return i == j
            case Atom() | CoAtom():
                return False
            case NotP(b) | NotN(b) | Neg(b):
                return self._occurs(i, b)
        return self._occurs(i, f.left) or self._occurs(i, f.right)

    def unify(self, a: Formula, b: Formula) -> None:
        a, b = self.walk(a), self.walk(b)
        if a == b:
            return
        if isinstance(a, Meta):
            if self._occurs(a.ident, b):
                raise UnifyError(f"cyclic formula {show_formula(a)} = {show_formula(self.resolve(b))}")
            self.binding[a.ident] = b
            return
        if isinstance(b, Meta):
            self.unify(b, a)
            return
        if type(a) is not type(b):
            raise UnifyError(f"{show_formula(self.resolve(a))} vs {show_formula(self.resolve(b))}")
        match a:
            case Atom(n) | CoAtom(n):
                if n != b.name:
                    raise UnifyError(f"{n} vs {b.name}")
            case NotP(x) | NotN(x) | Neg(x):
                self.unify(x, b.body)
            case _:
                self.unify(a.left, b.left)
                self.unify(a.right, b.right)


def ground(f: Formula, default: Formula = Atom("O")) -> Formula:
    """Replace remaining metavariables by a default atom."""
    match f:
        case Meta():
            return default
        case Atom() | CoAtom():
            return f
        case NotP(b):
            return NotP(ground(b, default))
        case NotN(b):
            return NotN(ground(b, default))
        case Neg(b):
            return Neg(ground(b, default))
    return type(f)(ground(f.left, default), ground(f.right, default))
