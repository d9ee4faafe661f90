"""Fixed example corpora: displayed examples, a lambda-program corpus and a typed corpus."""
from __future__ import annotations

from dataclasses import dataclass, field

from .formula import Formula
from .parser import parse, parse_env, parse_formula


@dataclass(frozen=True)
class Entry:
    name: str
    text: str
    calculus: str = "lfoc"
    kind: str = "command"
    gamma: dict = field(default_factory=dict)
    delta: dict = field(default_factory=dict)
    formula: Formula | None = None

    @property
    def term(self):
        return parse(self.text, self.calculus, self.kind)


def _e(name, text, kind="command", gamma="", delta="", formula=None, calculus="lfoc"):
    return Entry(name, text, calculus, kind, parse_env(gamma) if gamma else {},
                 parse_env(delta) if delta else {}, parse_formula(formula) if formula else None)


# ---------------------------------------------------------------- the exchange of negated sums

V1 = "((~mu u1.<val inl(u1)|b>)^, (~mu u2.<val inr(u2)|b>)^)"
V2 = "(~mu [inl(y1).<val y1|a1> | inr(y2).<val y2|a2>])^"
C1 = f"<val y | ~mu b^.<val {V1}|a>>"
C2 = f"<val x | ~mu (a1^,a2^).<val {V2}|g>>"

# ---------------------------------------------------------------- self-application

DD_CONTEXT = "~mu (x,al^).<val x | ~mu y.<val x | coval (y,al^)>>"
DD_COMMAND = f"<val ({DD_CONTEXT})^ | ~mu z.<val ({DD_CONTEXT})^ | coval (z,g^)>>"

EXAMPLES: dict[str, Entry] = {e.name: e for e in [
    _e("pair-neg-value", "(~mu (x,a^).<val x|a>)^", "value", formula="~(P * ~P)"),
    _e("excluded-middle", "<val inr((~mu x.<val inl(x)|a>)^) | a>", delta="a: P + ~P"),
    _e("swap-context", "~mu (x2,x1).<val (x1,x2)|a>", "context", delta="a: P1 * P2",
       formula="P2 * P1"),
    _e("iso-v1", V1, "value", delta="b: P1 + P2", formula="~P1 * ~P2"),
    _e("iso-v2", V2, "value", delta="a1: P1, a2: P2", formula="~(P1 + P2)"),
    _e("iso-c1", C1, gamma="y: ~(P1 + P2)", delta="a: ~P1 * ~P2"),
    _e("iso-c2", C2, gamma="x: ~P1 * ~P2", delta="g: ~(P1 + P2)"),
    _e("iso-roundtrip", f"<mu g.{C2} | ~mu y.{C1}>", gamma="x: ~P1 * ~P2", delta="a: ~P1 * ~P2"),
    _e("deltadelta", DD_COMMAND),
    _e("double-negation", "~mu b^.<val a^|b>", "context", delta="a: P", formula="~~P"),
    _e("lafont", "<mu a.<x0|a0> | ~mu x.<y0|b0>>", calculus="lk",
       gamma="x0: X, y0: Y", delta="a0: X, b0: Y"),
]}

# Rejected variants of the first three examples.
MUTANTS: dict[str, Entry] = {e.name: e for e in [
    _e("swap-context-unfixed", "~mu (x1,x2).<val (x1,x2)|a>", "context", delta="a: P1 * P2",
       formula="P2 * P1"),
    _e("excluded-middle-wrong-injection", "<val inl((~mu x.<val inl(x)|a>)^) | a>",
       delta="a: P + ~P"),
    _e("pair-neg-value-wrong-side", "(~mu (x,a^).<val x|a>)^", "value", formula="~(~P * P)"),
]}

# ---------------------------------------------------------------- lambda programs

_TWO = r"(\f.\z.f (f z))"
_PLUS = r"(\m.\n.\f.\z.m f (n f z))"
_DELTA = r"(\x.x x)"

LAMBDA_PROGRAMS: dict[str, str] = {
    "identity": r"\x.x",
    "id-id": r"(\x.x) (\y.y)",
    "K": r"(\x.\y.x) (\a.a) (\b.b)",
    "delta-delta": f"{_DELTA} {_DELTA}",
    "two-plus-two": f"{_PLUS} {_TWO} {_TWO} (\\u.u) (\\v.v)",
    "K-discards-loop": f"(\\x.\\y.x) (\\z.z) ({_DELTA} {_DELTA})",
    "twice-id": r"(\f.f (f (\z.z))) (\w.w)",
    "succ-one": r"(\n.\f.\z.f (n f z)) (\f.\z.f z) (\u.u) (\v.v)",
    "delta-id": f"{_DELTA} (\\y.y)",
    "SKK": r"(\x.\y.\z.x z (y z)) (\a.\b.a) (\c.\d.c) (\e.e)",
    "apply": r"(\x.\y.x y) (\z.z) (\w.w)",
    "two-two": f"{_TWO} {_TWO} (\\u.u) (\\v.v)",
    "inner-redex": r"(\x.(\y.y) x) (\z.z)",
    "church-two-id": f"{_TWO} (\\y.y) (\\z.z)",
    "constant-loop": f"(\\x.\\y.y) ({_DELTA} {_DELTA})",
}

# Simply typable programs (their call-by-value encodings join the typed corpus).
TYPED_LAMBDA = ["identity", "id-id", "K", "apply", "inner-redex", "twice-id", "church-two-id"]


def lambda_corpus():
    return {k: parse(v, "lam", "term") for k, v in LAMBDA_PROGRAMS.items()}


# ---------------------------------------------------------------- the typed corpus

def typed_corpus(size: int = 30, seed: int = 0) -> list[Entry]:
    """Examples, the three cases of the factorisation proof, CBV encodings, then generated commands."""
    from .gen import DELTA0, GAMMA0, lfoc_commands
    from .printer import show
    from .translate import cbv_to_lkq
    out = [e for e in EXAMPLES.values() if e.calculus == "lfoc" and e.name != "deltadelta"]
    out += [
        _e("factor-cut", "<mu b.<val x|b> | a>", gamma="x: X", delta="a: X"),
        _e("factor-val", "val x", "expr", gamma="x: X", formula="X"),
        _e("factor-covar", "a", "context", delta="a: X", formula="X"),
    ]
    for name in TYPED_LAMBDA:
        M = parse(LAMBDA_PROGRAMS[name], "lam", "term")
        out.append(Entry(f"cbv-{name}", show(cbv_to_lkq(M)), "lfoc", "expr"))
    for i, c in enumerate(lfoc_commands(seed, max(0, size - len(out)), depth=3)):
        out.append(Entry(f"generated-{i}", show(c), "lfoc", "command", dict(GAMMA0), dict(DELTA0)))
    return out[:size]
