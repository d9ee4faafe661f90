"""Recursive-descent parser for the ASCII surface syntax of every calculus.

Calculus tags: ``lfoc`` (focalised, typed by LKQ), ``lk`` (raw LK),
``lkt`` (call-by-name mirror), ``llp`` (polarised subsystem), ``synth``
(records), ``inter`` (counterpatterns with command trees), ``nj`` and
``lam`` (lambda terms), ``lbar`` (the value-passing machine calculus).
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from . import formula as F
from .patterns import (
    CoPat, PBul, PInl, PInr, PPair, PVar, Pat, QBul, QCopair, QPair, QVar, pat_leaves,
)
from .terms import (
    App, Bullet, Cmd, Control, CoPairC, CoVar, Dot, Down, Inl, Inr, Lam, LamCase, LamP, Mu, MuB,
    MuP, MuQ, MuQC, MuS, MuT, MuTB, MuTP, MuTS, Named, Node, Pair, Reified, Sub, SVal, Val, Var,
    all_names, fresh, fv,
)

CALCULI = ("lfoc", "lk", "lkt", "llp", "synth", "inter", "nj", "lam", "lbar")
CATEGORIES = ("command", "expr", "value", "context", "covalue", "term", "formula")

KEYWORDS = {"mu", "val", "coval", "inl", "inr", "fst", "snd", "down", "case", "of",
            "control", "reify", "not", "par"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<sym>~mu(?![A-Za-z0-9_'])|:=|->|::|/\\|\\/|~-|[<>|(),.^\[\]{};\\*+~&:-])
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


@dataclass
class Tok:
    kind: str  # 'sym', 'id', 'kw', 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    out, pos, line, lstart = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - lstart + 1)
        s = m.group(0)
        if m.lastgroup != "ws":
            kind = m.lastgroup
            if kind == "id" and s in KEYWORDS:
                kind = "kw"
            out.append(Tok(kind, s, line, pos - lstart + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            lstart = pos + s.rfind("\n") + 1
        pos = m.end()
    out.append(Tok("eof", "", line, pos - lstart + 1))
    return out


class Parser:
    def __init__(self, text: str, calc: str = "lfoc"):
        if calc not in CALCULI:
            raise ValueError(f"unknown calculus {calc!r}")
        self.toks = tokenize(text)
        self.i = 0
        self.calc = calc

    # -- token helpers
    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in ("sym", "kw") and t.text == text

    def next(self) -> Tok:
        t = self.peek()
        self.i += 1
        return t

    def fail(self, msg: str, tok: Tok | None = None):
        tok = tok or self.peek()
        shown = tok.text or "end of input"
        raise ParseError(f"{msg} (found {shown!r})", tok.line, tok.col)

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.next()

    def ident(self) -> str:
        t = self.peek()
        if t.kind != "id":
            self.fail("expected a name")
        self.i += 1
        return t.text

    def done(self):
        if self.peek().kind != "eof":
            self.fail("trailing input")

    # -- entry
    def parse(self, category: str):
        c = self.calc
        if category == "formula":
            r = self.formula()
        elif category == "pattern":
            r = self.pattern()
        elif category == "copattern":
            r = self.copattern()
        elif c in ("nj", "lam"):
            if category not in ("term", "value", "command", "expr"):
                self.fail(f"category {category} does not exist in {c}")
            r = self.lam_term()
        elif c == "lkt":
            r = {"command": self.lkt_command, "expr": self.lkt_expr, "context": self.lkt_context,
                 "covalue": self.lkt_covalue}.get(category, lambda: self.fail(
                     f"category {category} does not exist in lkt"))()
        elif c == "lbar":
            r = {"command": self.lbar_command, "expr": self.lbar_expr,
                 "value": self.lbar_value, "context": self.lbar_context}.get(
                category, lambda: self.fail(f"category {category} does not exist in lbar"))()
        else:
            table = {"command": self.command, "context": self.context}
            if c == "lk":
                table["expr"] = self.lk_expr
                table["value"] = self.lk_expr
            elif c == "llp":
                table["value"] = self.value
            else:
                table["expr"] = self.expr
                table["value"] = self.value
            if category not in table:
                self.fail(f"category {category} does not exist in {c}")
            r = table[category]()
        self.done()
        return r

    # ------------------------------------------------------------- formulas
    def formula(self) -> F.Formula:
        left = self.f_sum()
        if self.at("->"):
            self.next()
            return F.Arrow(left, self.formula())
        return left

    def f_sum(self) -> F.Formula:
        left = self.f_prod()
        for sym, ctor in (("+", F.Plus), ("\\/", F.Or), ("par", F.Par)):
            if self.at(sym):
                self.next()
                return ctor(left, self.f_sum())
        return left

    def f_prod(self) -> F.Formula:
        left = self.f_unary()
        for sym, ctor in (("*", F.Tensor), ("/\\", F.And), ("&", F.With)):
            if self.at(sym):
                self.next()
                return ctor(left, self.f_prod())
        return left

    def f_unary(self) -> F.Formula:
        if self.at("~-"):
            self.next()
            return F.NotN(self.f_unary())
        if self.at("~"):
            self.next()
            return F.NotP(self.f_unary())
        if self.at("not"):
            self.next()
            return F.Neg(self.f_unary())
        if self.at("-"):
            self.next()
            return F.CoAtom(self.ident())
        if self.at("("):
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        return F.Atom(self.ident())

    # ------------------------------------------------------------- explicit substitutions
    def postfix(self, t: Node) -> Node:
        while self.at("[") and self.peek(1).kind == "id" and self.at(":=", 2):
            self.next()
            binds = []
            vs, cs = _split(fv(t))
            while True:
                name = self.ident()
                self.expect(":=")
                if name in cs:
                    binds.append(("c", name, self.context()))
                elif name in vs:
                    binds.append(("v", name, self.bound_value()))
                else:
                    save = self.i
                    try:
                        binds.append(("v", name, self.bound_value()))
                        if not (self.at(",") or self.at("]")):
                            raise ParseError("", 0, 0)
                    except ParseError:
                        self.i = save
                        binds.append(("c", name, self.context()))
                if self.at(","):
                    self.next()
                    continue
                self.expect("]")
                break
            names = [(ns, n) for ns, n, _ in binds]
            if len(names) != len(set(names)):
                self.fail("a name is bound twice in the substitution")
            t = Sub(t, tuple(binds))
        return t

    def bound_value(self) -> Node:
        return self.lk_expr() if self.calc == "lk" else self.value()

    # ------------------------------------------------------------- commands
    def command(self) -> Node:
        if self.calc == "inter" and self.at("["):
            self.next()
            left = self.command()
            self.expect("|")
            q1 = self.copattern()
            self.expect(",")
            q2 = self.copattern()
            self.expect("|")
            right = self.command()
            self.expect("]")
            return CoPairC(left, q1, q2, right)
        if self.at("("):
            self.next()
            c = self.command()
            self.expect(")")
            return self.postfix(c)
        self.expect("<")
        if self.calc == "lk":
            left = self.lk_expr()
        elif self.calc == "llp":
            left = self.value()
        else:
            left = self.expr()
        self.expect("|")
        right = self.context()
        self.expect(">")
        return self.postfix(Cmd(left, right))

    # ------------------------------------------------------------- expressions
    def expr(self) -> Node:
        if self.calc == "llp":
            self.fail("the polarised subsystem has no expression category")
        if self.at("val"):
            self.next()
            return self.postfix(Val(self.value()))
        if self.at("mu"):
            self.next()
            a = self.ident()
            self.expect(".")
            return Mu(a, self.command())
        if self.at("("):
            self.next()
            v = self.expr()
            self.expect(")")
            return self.postfix(v)
        self.fail("expected an expression ('val' or 'mu')")

    def lk_expr(self) -> Node:
        t = self.peek()
        if t.kind == "id":
            self.next()
            if self.at("^"):
                self.next()
                return self.postfix(Bullet(CoVar(t.text)))
            return self.postfix(Var(t.text))
        if self.at("mu"):
            self.next()
            a = self.ident()
            self.expect(".")
            return Mu(a, self.command())
        if self.at("inl") or self.at("inr"):
            ctor = Inl if self.next().text == "inl" else Inr
            self.expect("(")
            v = self.lk_expr()
            self.expect(")")
            return self.postfix(ctor(v))
        if self.at("("):
            self.next()
            if self.at("~mu") or self.at("coval"):
                e = self.context()
                self.expect(")")
                self.expect("^")
                return self.postfix(Bullet(e))
            v = self.lk_expr()
            if self.at(","):
                self.next()
                w = self.lk_expr()
                self.expect(")")
                return self.postfix(Pair(v, w))
            self.expect(")")
            return self.postfix(v)
        self.fail("expected an expression")

    # ------------------------------------------------------------- values
    def value(self) -> Node:
        if self.calc == "synth":
            return self.synth_value()
        t = self.peek()
        if t.kind == "id":
            self.next()
            if self.at("^"):
                self.next()
                return self.postfix(Bullet(CoVar(t.text)))
            return self.postfix(Var(t.text))
        if self.at("inl") or self.at("inr"):
            ctor = Inl if self.next().text == "inl" else Inr
            self.expect("(")
            v = self.value()
            self.expect(")")
            return self.postfix(ctor(v))
        if self.at("("):
            self.next()
            if self.at("~mu") or self.at("coval") or self.at("down"):
                e = self.context()
                self.expect(")")
                self.expect("^")
                return self.postfix(Bullet(e))
            v = self.value()
            if self.at(","):
                self.next()
                w = self.value()
                self.expect(")")
                return self.postfix(Pair(v, w))
            self.expect(")")
            if self.at("^"):
                self.next()
                if isinstance(v, Var):
                    return self.postfix(Bullet(CoVar(v.name)))
                self.fail("only contexts can be packed with '^'")
            return self.postfix(v)
        self.fail("expected a value")

    def synth_value(self) -> Node:
        p = self.pattern()
        self.expect("{")
        given = {}
        while not self.at("}"):
            name = self.ident()
            bullet = False
            if self.at("^"):
                self.next()
                bullet = True
            self.expect(":=")
            if bullet:
                if self.peek().kind == "id":
                    a = self.ident()
                    self.expect("^")
                    v = Bullet(CoVar(a))
                else:
                    self.expect("(")
                    e = self.context()
                    self.expect(")")
                    self.expect("^")
                    v = Bullet(e)
            else:
                v = Var(self.ident())
            given[("c" if bullet else "v", name)] = v
            if not self.at("}"):
                self.expect(",")
        self.expect("}")
        fills = []
        for l in pat_leaves(p):
            key = ("v", l.name) if isinstance(l, PVar) else ("c", l.name)
            if key not in given:
                self.fail(f"pattern leaf {l.name} has no filling")
            fills.append(given.pop(key))
        if given:
            self.fail(f"filling for a name not in the pattern: {next(iter(given))[1]}")
        return SVal(p, tuple(fills))

    def pattern(self) -> Pat:
        if self.at("inl") or self.at("inr"):
            ctor = PInl if self.next().text == "inl" else PInr
            return ctor(self.pattern())
        if self.at("("):
            self.next()
            a = self.pattern()
            if self.at(")"):
                self.next()
                return a
            self.expect(",")
            b = self.pattern()
            self.expect(")")
            return PPair(a, b)
        n = self.ident()
        if self.at("^"):
            self.next()
            return PBul(n)
        return PVar(n)

    def copattern(self) -> CoPat:
        if self.at("("):
            self.next()
            a = self.copattern()
            self.expect(",")
            b = self.copattern()
            self.expect(")")
            return QPair(a, b)
        if self.at("["):
            self.next()
            a = self.copattern()
            self.expect(",")
            b = self.copattern()
            self.expect("]")
            return QCopair(a, b)
        n = self.ident()
        if self.at("^"):
            self.next()
            return QBul(n)
        return QVar(n)

    # ------------------------------------------------------------- contexts
    def context(self) -> Node:
        t = self.peek()
        if t.kind == "id":
            self.next()
            return self.postfix(CoVar(t.text))
        if self.at("("):
            self.next()
            e = self.context()
            self.expect(")")
            return self.postfix(e)
        if self.at("down"):
            if self.calc != "llp":
                self.fail("'down' belongs to the polarised subsystem")
            self.next()
            self.expect("(")
            v = self.value()
            self.expect(")")
            return self.postfix(Down(v))
        if self.at("coval"):
            if self.calc not in ("lfoc",):
                self.fail("'coval' is sugar of the focalised calculus")
            self.next()
            v = self.value()
            a = fresh("a", all_names(v))
            return MuTB(a, Cmd(Val(v), CoVar(a)))
        if self.at("~mu"):
            self.next()
            if self.calc in ("synth", "inter"):
                return self.record_binder()
            if self.at("["):
                return self.case_binder()
            if self.at("("):
                return self.pair_binder()
            name = self.ident()
            if self.at("^"):
                self.next()
                self.expect(".")
                return MuTB(name, self.command())
            self.expect(".")
            return MuT(name, self.command())
        self.fail("expected a context")

    def record_binder(self) -> Node:
        q = self.copattern()
        self.expect(".")
        if self.calc == "inter":
            return MuQC(q, self.command())
        self.expect("{")
        fields = []
        while not self.at("}"):
            p = self.pattern()
            self.expect("->")
            fields.append((p, self.command()))
            if not self.at("}"):
                self.expect(";")
        self.expect("}")
        return MuQ(q, tuple(fields))

    def case_binder(self) -> Node:
        self.expect("[")
        self.expect("inl")
        self.expect("(")
        x1 = self.ident()
        self.expect(")")
        self.expect(".")
        c1 = self.command()
        self.expect("|")
        self.expect("inr")
        self.expect("(")
        x2 = self.ident()
        self.expect(")")
        self.expect(".")
        c2 = self.command()
        self.expect("]")
        return MuTS(x1, c1, x2, c2)

    def _binder_component(self) -> tuple[str, bool]:
        n = self.ident()
        if self.at("^"):
            self.next()
            return n, True
        return n, False

    def pair_binder(self) -> Node:
        self.expect("(")
        comps = [self._binder_component()]
        self.expect(",")
        comps.append(self._binder_component())
        self.expect(")")
        self.expect(".")
        body = self.command()
        return expand_pair_binder(comps, body, lk=self.calc == "lk")

    # ------------------------------------------------------------- LKT (mirror syntax)
    def lkt_command(self) -> Node:
        self.expect("<")
        v = self.lkt_expr()
        self.expect("|")
        e = self.lkt_context()
        self.expect(">")
        return Cmd(v, e)

    def lkt_expr(self) -> Node:
        t = self.peek()
        if t.kind == "id":
            self.next()
            return Var(t.text)
        if self.at("("):
            self.next()
            v = self.lkt_expr()
            self.expect(")")
            return v
        self.expect("mu")
        if self.at("["):
            self.next()
            self.expect("fst")
            self.expect("(")
            a1 = self.ident()
            self.expect(")")
            self.expect(".")
            c1 = self.lkt_command()
            self.expect("|")
            self.expect("snd")
            self.expect("(")
            a2 = self.ident()
            self.expect(")")
            self.expect(".")
            c2 = self.lkt_command()
            self.expect("]")
            return MuS(a1, c1, a2, c2)
        if self.at("("):
            self.next()
            comps = [self._binder_component()]
            self.expect(",")
            comps.append(self._binder_component())
            self.expect(")")
            self.expect(".")
            return expand_lkt_pair_binder(comps, self.lkt_command())
        name = self.ident()
        if self.at("^"):
            self.next()
            self.expect(".")
            return MuB(name, self.lkt_command())
        self.expect(".")
        return Mu(name, self.lkt_command())

    def lkt_context(self) -> Node:
        if self.at("val"):
            self.next()
            return Val(self.lkt_covalue())
        if self.at("~mu"):
            self.next()
            x = self.ident()
            self.expect(".")
            return MuT(x, self.lkt_command())
        if self.at("("):
            self.next()
            e = self.lkt_context()
            self.expect(")")
            return e
        self.fail("expected an LKT context ('val E' or '~mu x.c')")

    def lkt_covalue(self) -> Node:
        t = self.peek()
        if t.kind == "id":
            self.next()
            if self.at("^"):
                self.next()
                return Bullet(Var(t.text))
            return CoVar(t.text)
        if self.at("fst") or self.at("snd"):
            ctor = Inl if self.next().text == "fst" else Inr
            self.expect("(")
            e = self.lkt_covalue()
            self.expect(")")
            return ctor(e)
        if self.at("["):
            self.next()
            a = self.lkt_covalue()
            self.expect(",")
            b = self.lkt_covalue()
            self.expect("]")
            return Pair(a, b)
        if self.at("("):
            self.next()
            if self.at("mu"):
                v = self.lkt_expr()
                self.expect(")")
                self.expect("^")
                return Bullet(v)
            a = self.lkt_covalue()
            if self.at(","):
                self.next()
                b = self.lkt_covalue()
                self.expect(")")
                return Pair(a, b)
            self.expect(")")
            return a
        self.fail("expected a covalue")

    # ------------------------------------------------------------- lambda / NJ
    def lam_term(self) -> Node:
        t = self.lam_atom()
        while self._starts_atom():
            t = App(t, self.lam_atom())
        return t

    def _starts_atom(self) -> bool:
        t = self.peek()
        return t.kind == "id" or any(self.at(s) for s in ("(", "\\", "inl", "inr", "mu", "control", "reify", "["))

    def lam_atom(self) -> Node:
        t = self.peek()
        if t.kind == "id":
            self.next()
            return Var(t.text)
        if self.at("\\"):
            self.next()
            if self.at("("):
                self.next()
                x1 = self.ident()
                self.expect(",")
                x2 = self.ident()
                self.expect(")")
                self.expect(".")
                return LamP(x1, x2, self.lam_term())
            x = self.ident()
            self.expect(".")
            if self.at("case"):
                self.next()
                z = self.ident()
                if z != x:
                    self.fail("case must scrutinise the bound variable")
                self.expect("of")
                self.expect("inl")
                self.expect("(")
                x1 = self.ident()
                self.expect(")")
                self.expect("->")
                c1 = self.lam_term()
                self.expect("|")
                self.expect("inr")
                self.expect("(")
                x2 = self.ident()
                self.expect(")")
                self.expect("->")
                c2 = self.lam_term()
                return LamCase(x, x1, c1, x2, c2)
            return Lam(x, self.lam_term())
        if self.at("inl") or self.at("inr"):
            ctor = Inl if self.next().text == "inl" else Inr
            self.expect("(")
            v = self.lam_term()
            self.expect(")")
            return ctor(v)
        if self.at("("):
            self.next()
            a = self.lam_term()
            if self.at(","):
                self.next()
                b = self.lam_term()
                self.expect(")")
                return Pair(a, b)
            self.expect(")")
            return a
        if self.at("mu"):
            self.next()
            a = self.ident()
            self.expect(".")
            self.expect("[")
            b = self.ident()
            self.expect("]")
            return Mu(a, Named(b, self.lam_term()))
        if self.at("["):
            self.next()
            b = self.ident()
            self.expect("]")
            return Named(b, self.lam_term())
        if self.at("control"):
            self.next()
            self.expect("(")
            m = self.lam_term()
            self.expect(")")
            return Control(m)
        if self.at("reify"):
            self.next()
            self.expect("[")
            items = []
            while not self.at("]"):
                items.append(self.lam_term())
                if not self.at("]"):
                    self.expect(",")
            self.expect("]")
            return Reified(tuple(items))
        self.fail("expected a lambda term")

    # ------------------------------------------------------------- value-passing calculus
    def lbar_command(self) -> Node:
        self.expect("<")
        m = self.lbar_expr()
        self.expect("|")
        e = self.lbar_context()
        self.expect(">")
        return Cmd(m, e)

    def lbar_expr(self) -> Node:
        if self.at("val"):
            self.next()
            return Val(self.lbar_value())
        if self.at("mu"):
            self.next()
            a = self.ident()
            self.expect(".")
            return Mu(a, self.lbar_command())
        if self.at("("):
            self.next()
            m = self.lbar_expr()
            self.expect(")")
            return m
        self.fail("expected 'val V' or 'mu a.c'")

    def lbar_value(self) -> Node:
        if self.at("\\"):
            self.next()
            x = self.ident()
            self.expect(".")
            return Lam(x, self.lbar_expr())
        if self.at("("):
            self.next()
            v = self.lbar_value()
            self.expect(")")
            return v
        return Var(self.ident())

    def lbar_context(self) -> Node:
        if self.at("~mu"):
            self.next()
            x = self.ident()
            self.expect(".")
            return MuT(x, self.lbar_command())
        if self.peek().kind == "id" and not self.at("::", 1):
            return CoVar(self.ident())
        v = self.lbar_value()
        self.expect("::")
        return Dot(v, self.lbar_context())


def _split(keys):
    return ({n for ns, n in keys if ns == "v"}, {n for ns, n in keys if ns == "c"})


def expand_pair_binder(comps, body: Node, lk: bool = False) -> Node:
    """~mu(c1,c2).c where a component a^ unpacks a negation.

    Components are unpacked second-first, so ~mu(a1^,a2^).c reads
    ~mu(x1,x2).< val x2 | ~mu a2^.< val x1 | ~mu a1^.c > >.
    """
    avoid = all_names(body) | {n for n, _ in comps}
    names = []
    for n, bullet in comps:
        if bullet:
            y = fresh("y", avoid)
            avoid.add(y)
            names.append(y)
        else:
            names.append(n)
    for (n, bullet), y in zip(comps, names):
        if bullet:
            head = Var(y) if lk else Val(Var(y))
            body = Cmd(head, MuTB(n, body))
    return MuTP(names[0], names[1], body)


def expand_lkt_pair_binder(comps, body: Node) -> Node:
    """Mirror image of :func:`expand_pair_binder`: mu(x^,a).c in the call-by-name calculus."""
    avoid = all_names(body) | {n for n, _ in comps}
    names = []
    for n, bullet in comps:
        if bullet:
            g = fresh("g", avoid)
            avoid.add(g)
            names.append(g)
        else:
            names.append(n)
    for (n, bullet), g in zip(comps, names):
        if bullet:
            body = Cmd(MuB(n, body), Val(CoVar(g)))
    return MuP(names[0], names[1], body)


def parse(text: str, calculus: str = "lfoc", category: str = "command"):
    return Parser(text, calculus).parse(category)


def parse_formula(text: str) -> F.Formula:
    return Parser(text, "lfoc").parse("formula")


def parse_pattern(text: str) -> Pat:
    return Parser(text, "synth").parse("pattern")


def parse_copattern(text: str) -> CoPat:
    return Parser(text, "synth").parse("copattern")


def parse_env(text: str) -> dict[str, F.Formula]:
    """'x:X, y:~X' -> {'x': X, 'y': ~X}."""
    out: dict[str, F.Formula] = {}
    text = text.strip()
    if not text:
        return out
    for item in text.split(","):
        if ":" not in item:
            raise ParseError(f"expected name:formula in {item.strip()!r}", 1, 1)
        name, f = item.split(":", 1)
        name = name.strip()
        if name in out:
            raise ParseError(f"{name} declared twice", 1, 1)
        out[name] = parse_formula(f)
    return out
