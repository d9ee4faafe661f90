"""ASCII rendering of terms; the inverse of :mod:`focal.parser`."""
from __future__ import annotations

from .patterns import pat_leaves, show_copat, show_pat, PVar
from .terms import (
    App, Bullet, Cmd, Control, CoPairC, CoVar, Dot, Down, Inl, Inr, Lam, LamCase, LamP, Mu, MuB,
    MuP, MuQ, MuQC, MuS, MuT, MuTB, MuTP, MuTS, Named, Node, Pair, Reified, Sub, SVal, Val, Var,
)

# Constructs whose body extends as far right as possible.
_OPEN = (Mu, MuT, MuTB, MuB, MuTP, MuP, Lam, LamP, LamCase, MuQC, MuQ, Dot)


def show(t: Node, calc: str = "lfoc") -> str:
    return _Printer(calc).go(t)


class _Printer:
    def __init__(self, calc: str):
        self.lkt = calc == "lkt"

    def wrap(self, t: Node) -> str:
        s = self.go(t)
        return f"({s})" if isinstance(t, _OPEN + (Sub,)) else s

    def atom(self, t: Node) -> str:
        """Wrap anything that is not a name, pair or bracketed form."""
        s = self.go(t)
        return s if isinstance(t, (Var, CoVar, Pair, Inl, Inr, Down, Control, Reified)) else f"({s})"

    def go(self, t: Node) -> str:
        g = self.go
        match t:
            case Var(n) | CoVar(n):
                return n
            case Cmd(l, r):
                return f"< {g(l)} | {g(r)} >"
            case Val(b):
                return f"val {self.wrap(b)}"
            case Mu(a, c):
                return f"mu {a}.{g(c)}"
            case MuT(x, c):
                return f"~mu {x}.{g(c)}"
            case MuTB(a, c):
                return f"~mu {a}^.{g(c)}"
            case MuB(x, c):
                return f"mu {x}^.{g(c)}"
            case MuTP(x1, x2, c):
                return f"~mu({x1},{x2}).{g(c)}"
            case MuP(a1, a2, c):
                return f"mu({a1},{a2}).{g(c)}"
            case MuTS(x1, c1, x2, c2):
                return f"~mu[inl({x1}).{g(c1)} | inr({x2}).{g(c2)}]"
            case MuS(a1, c1, a2, c2):
                return f"mu[fst({a1}).{g(c1)} | snd({a2}).{g(c2)}]"
            case Pair(a, b):
                return f"({g(a)},{g(b)})"
            case Inl(b):
                return f"{'fst' if self.lkt else 'inl'}({g(b)})"
            case Inr(b):
                return f"{'snd' if self.lkt else 'inr'}({g(b)})"
            case Bullet(b):
                s = g(b)
                return f"{s}^" if isinstance(b, (Var, CoVar)) else f"({s})^"
            case Down(b):
                return f"down({g(b)})"
            case Sub(b, binds):
                body = g(b)
                if isinstance(b, _OPEN + (Val,)):
                    body = f"({body})"
                items = ", ".join(f"{n}:={g(v)}" for _, n, v in binds)
                return f"{body}[{items}]"
            case Lam(x, b):
                return f"\\{x}.{g(b)}"
            case LamP(x1, x2, b):
                return f"\\({x1},{x2}).{g(b)}"
            case LamCase(z, x1, c1, x2, c2):
                return f"\\{z}.case {z} of inl({x1}) -> {self.wrap(c1)} | inr({x2}) -> {g(c2)}"
            case App(f, a):
                fs = self.wrap(f) if not isinstance(f, App) else g(f)
                return f"{fs} {self.atom(a)}"
            case Named(b, m):
                return f"[{b}]{self.wrap(m)}"
            case Control(m):
                return f"control({g(m)})"
            case Reified(stack):
                return "reify[" + ", ".join(g(x) for x in stack) + "]"
            case Dot(v, e):
                return f"{self.wrap(v)} :: {g(e)}"
            case SVal(p, fills):
                items = ", ".join(
                    f"{l.name if isinstance(l, PVar) else l.name + '^'}:={g(v)}"
                    for l, v in zip(pat_leaves(p), fills))
                return f"{show_pat(p)}{{{items}}}"
            case MuQ(q, fields):
                body = " ; ".join(f"{show_pat(p)} -> {g(c)}" for p, c in fields)
                return f"~mu {show_copat(q)}.{{ {body} }}"
            case MuQC(q, tree):
                return f"~mu {show_copat(q)}.{g(tree)}"
            case CoPairC(l, q1, q2, r):
                return f"[{g(l)} |{show_copat(q1)},{show_copat(q2)}| {g(r)}]"
        raise TypeError(f"cannot print {type(t).__name__}")
