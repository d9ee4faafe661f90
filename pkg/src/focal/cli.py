"""Command-line front end.

Exit codes: 0 success, 1 domain failure (ill-typed term, failed check,
unexpected reduction outcome), 2 usage or parse error.

Input comes from exactly one of a file argument or ``-e TEXT``.  A file
may carry directive lines that set defaults for the typing context::

    --! calculus: lfoc
    --! kind: command
    --! gamma: x: X, y: ~X
    --! delta: a: X
    --! formula: X * ~X

Command-line flags take precedence over directives.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import formula as F
from .parser import (
    CALCULI, ParseError, parse, parse_copattern, parse_env, parse_formula, parse_pattern,
)
from .printer import show
from .reduction import LOOP, NORMAL, TraceStep
from .typing import TypeCheckError

ALIASES = {"lkq": "lfoc"}
KINDS = ("command", "expr", "value", "context", "term")
DEFAULT_FUEL = 10000
DEMOS = ("lafont", "deltadelta", "iso", "copairing", "nonreflection", "double-negation",
         "alpha-clause")


class UsageError(Exception):
    """Bad invocation (exit 2)."""


class DomainFailure(Exception):
    """The computation ran but the outcome is a failure (exit 1)."""

    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload or {}


@dataclass
class Source:
    text: str
    directives: dict = field(default_factory=dict)
    origin: str = "<inline>"


def calc_name(c: str) -> str:
    c = ALIASES.get(c, c)
    if c not in CALCULI:
        raise UsageError(f"unknown calculus {c!r}; choose from {', '.join(CALCULI + tuple(ALIASES))}")
    return c


def read_source(args) -> Source:
    has_file = getattr(args, "file", None) is not None
    has_expr = getattr(args, "expr", None) is not None
    if has_file == has_expr:
        raise UsageError("give exactly one input: a file or -e TEXT")
    if has_expr:
        return Source(args.expr)
    try:
        with open(args.file, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    directives = {}
    for line in raw.splitlines():
        s = line.strip()
        if s.startswith("--!"):
            key, sep, val = s[3:].partition(":")
            if not sep:
                raise UsageError(f"malformed directive {s!r}")
            directives[key.strip()] = val.strip()
    return Source(raw, directives, args.file)


def setting(args, src: Source, name: str, default=None):
    v = getattr(args, name, None)
    if v is not None:
        return v
    return src.directives.get(name, default)


@dataclass
class Context:
    calculus: str
    kind: str
    gamma: dict
    delta: dict
    formula: F.Formula | None


def context_of(args, src: Source, default_calc: str = "lfoc", default_kind: str = "command") -> Context:
    calc = calc_name(setting(args, src, "calculus", default_calc))
    kind = setting(args, src, "kind", "term" if calc in ("lam", "nj") and default_kind == "command"
                   else default_kind)
    if kind not in KINDS:
        raise UsageError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    g = setting(args, src, "gamma", "")
    d = setting(args, src, "delta", "")
    f = setting(args, src, "formula")
    return Context(calc, kind, parse_env(g), parse_env(d), parse_formula(f) if f else None)


def parse_input(src: Source, ctx: Context):
    kind = "command" if ctx.kind == "term" and ctx.calculus not in ("lam", "nj") else ctx.kind
    return parse(src.text, ctx.calculus, kind)


def show_env(env: dict) -> str:
    return ", ".join(f"{n}: {F.show_formula(f)}" for n, f in env.items())


def seed_of(args) -> int:
    env = os.environ.get("FOCAL_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"FOCAL_SEED must be an integer, got {env!r}") from None
    return args.seed if getattr(args, "seed", None) is not None else 0


# ---------------------------------------------------------------- output

class Out:
    def __init__(self, as_json: bool, stream=None):
        self.json = as_json
        self.stream = stream or sys.stdout
        self.lines: list[str] = []
        self.data: dict = {}

    def line(self, s: str = "") -> None:
        self.lines.append(s)

    def put(self, **kv) -> None:
        self.data.update(kv)

    def flush(self, ok: bool = True) -> None:
        if self.json:
            json.dump({"ok": ok, **self.data}, self.stream, indent=2, sort_keys=True)
            self.stream.write("\n")
        else:
            for s in self.lines:
                self.stream.write(s + "\n")


def trace_json(trace, calc: str) -> list[dict]:
    return [{"index": i, "rule": st.rule, "position": list(st.position),
             "before": show(st.before, calc), "after": show(st.after, calc)}
            for i, st in enumerate(trace)]


def trace_text(trace, calc: str) -> list[str]:
    return [f"{i + 1:4d}. {st.rule:<22} @ {'.'.join(map(str, st.position)) or 'root'}  "
            f"{show(st.after, calc)}" for i, st in enumerate(trace)]


# ---------------------------------------------------------------- typing dispatch

def typecheck_any(t, ctx: Context):
    """Returns (derivation or None, formula or None) in the chosen calculus."""
    c, k = ctx.calculus, ctx.kind
    if c == "lfoc":
        from .typing import infer
        return infer(t, k, ctx.gamma, ctx.delta, "lkq", ctx.formula)
    if c == "lk":
        from .typing import infer
        return infer(t, k, ctx.gamma, ctx.delta, "lk", ctx.formula)
    if c == "lkt":
        from .lkq import Judgement, typecheck_lkt
        d = typecheck_lkt(Judgement(k, t, ctx.gamma, ctx.delta, ctx.formula))
        return d, d.formula
    if c == "llp":
        from .typing import infer
        if k == "expr":
            raise TypeCheckError("the polarised subsystem has no expressions")
        return infer(t, k, ctx.gamma, {}, "llp", ctx.formula)
    if c == "nj":
        from .lam import nj_typecheck
        return None, nj_typecheck(t, ctx.gamma, "command" if k == "command" else "value", ctx.formula)
    if c == "lam":
        from .lam import lam_typecheck
        return None, lam_typecheck(t, ctx.gamma, ctx.delta)
    if c == "synth":
        from .synth import typecheck_synth
        return None, typecheck_synth(t, ctx.gamma, ctx.delta, k, ctx.formula)
    if c == "inter":
        from .synth import typecheck_intermediate
        return None, typecheck_intermediate(t, ctx.gamma, ctx.delta, k, ctx.formula)
    raise UsageError(f"the {c} calculus has no type system here")


# ---------------------------------------------------------------- subcommands

def cmd_parse(args, out: Out) -> int:
    src = read_source(args)
    ctx = context_of(args, src)
    t = parse_input(src, ctx)
    s = show(t, ctx.calculus)
    out.line(s)
    out.put(calculus=ctx.calculus, kind=ctx.kind, term=s)
    return 0


def cmd_check(args, out: Out, force_calc: str | None = None) -> int:
    src = read_source(args)
    if force_calc:
        args.calculus = force_calc
    ctx = context_of(args, src)
    t = parse_input(src, ctx)
    d, A = typecheck_any(t, ctx)
    A = F.ground(A) if A is not None and not isinstance(A, str) else A
    fs = F.show_formula(A) if A is not None else None
    head = f"{show_env(ctx.gamma)} |- {show_env(ctx.delta)}"
    out.line(f"well-typed ({ctx.calculus}, {ctx.kind}): {head}" + (f"  : {fs}" if fs else ""))
    if getattr(args, "derivation", False) and d is not None:
        out.line(d.render())
    out.put(calculus=ctx.calculus, kind=ctx.kind, formula=fs, term=show(t, ctx.calculus),
            derivation=d.render() if (d is not None and getattr(args, "derivation", False)) else None)
    return 0


def _reduce(t, ctx: Context, args, seed: int):
    c = ctx.calculus
    strategy = args.strategy
    if strategy == "random":
        strategy = f"random:{seed}"
    if c == "lfoc":
        if args.wn:
            from .reduction import Result, normalize_wn
            nf, steps = normalize_wn(t, ctx.gamma, ctx.delta)
            return Result(nf, [TraceStep(s.rule, s.position, s.before, s.after) for s in steps],
                          NORMAL)
        from .reduction import Result, normalize, step
        bundled = not args.unbundled
        if not strategy.startswith("position:"):
            return normalize(t, args.fuel, strategy, bundled=bundled)
        # contract the chosen redex, then finish leftmost
        first, st = step(t, strategy, bundled)
        rest = normalize(first, max(args.fuel - 1, 0), "leftmost", bundled=bundled)
        loop = rest.loop_from + 1 if rest.loop_from is not None else None
        return Result(rest.term, [st] + rest.trace, rest.status, loop)
    if c == "lk":
        from .lk import normalize_lk
        return normalize_lk(t, args.prefer, args.fuel)
    if c == "lkt":
        from .lkq import lkt_normalize
        return lkt_normalize(t, args.fuel, strategy)
    if c == "llp":
        from .llp import llp_normalize
        return llp_normalize(t, args.fuel, strategy)
    if c == "synth":
        from .synth import synth_normalize
        return synth_normalize(t, args.fuel)
    raise UsageError(f"no reduction for the {c} calculus (use 'run' for machines)")


def _post_eta(t, calc: str):
    if calc == "lfoc":
        from .lkq import eta_normalize
        return eta_normalize(t)
    if calc == "llp":
        from .llp import llp_eta_normalize
        return llp_eta_normalize(t)
    raise UsageError(f"--eta is not available for the {calc} calculus")


def _expect(status: str, expect: str, extra_ok: bool = True) -> bool:
    if expect == "any":
        return True
    if expect == "loop":
        return status == LOOP
    return status == NORMAL and extra_ok


def cmd_reduce(args, out: Out) -> int:
    src = read_source(args)
    ctx = context_of(args, src)
    if ctx.kind != "command":
        raise UsageError("reduction starts from a command")
    t = parse_input(src, ctx)
    if args.check:
        typecheck_any(t, ctx)
    if args.replay:
        return _replay(args, out, t, ctx)
    r = _reduce(t, ctx, args, seed_of(args))
    final = _post_eta(r.term, ctx.calculus) if args.eta else r.term
    calc = ctx.calculus
    out.put(calculus=calc, start=show(t, calc), status=r.status, steps=r.steps,
            loop_from=r.loop_from, result=show(final, calc))
    if args.trace == "json" or out.json:
        out.put(trace=trace_json(r.trace, calc))
    if args.trace == "text":
        out.lines += trace_text(r.trace, calc)
    elif args.trace == "json" and not out.json:
        out.line(json.dumps({"calculus": calc, "start": show(t, calc), "status": r.status,
                             "steps": r.steps, "loop_from": r.loop_from,
                             "result": show(final, calc), "trace": trace_json(r.trace, calc)},
                            indent=2))
        return 0 if _expect(r.status, args.expect) else 1
    out.line(f"status: {r.status}")
    out.line(f"steps: {r.steps}")
    if r.loop_from is not None:
        out.line(f"loop: back to the state after step {r.loop_from}")
    out.line(f"result: {show(final, calc)}")
    return 0 if _expect(r.status, args.expect) else 1


def _replay(args, out: Out, t, ctx: Context) -> int:
    if ctx.calculus != "lfoc":
        raise UsageError("--replay works on the focalised calculus")
    from .reduction import replay
    try:
        with open(args.replay, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read trace {args.replay}: {exc}") from None
    try:
        end = replay(t, doc["trace"], bundled=not args.unbundled)
    except ValueError as exc:
        raise DomainFailure(str(exc)) from None
    got = show(end, "lfoc")
    want = doc.get("result")
    if args.eta:
        got = show(_post_eta(end, "lfoc"), "lfoc")
    same = want is None or want == got
    out.line(f"replayed {len(doc['trace'])} steps: {got}")
    if not same:
        out.line(f"recorded result differs: {want}")
    out.put(replayed=len(doc["trace"]), result=got, matches=same)
    return 0 if same else 1


def cmd_run(args, out: Out) -> int:
    from .machines import cbn_final, cbv_final, load, run_machine, show_state
    src = read_source(args)
    default = "lbar" if args.machine == "lbarq" else "lam"
    ctx = context_of(args, src, default, "command" if args.machine == "lbarq" else "term")
    t = parse_input(src, ctx)
    r = run_machine(load(args.machine, t), args.machine, args.fuel)
    final = {"cbn": cbn_final, "cbv": cbv_final}.get(args.machine, lambda s: True)(r.term)
    status = r.status if (r.status != NORMAL or final) else "Stuck"
    states = [show_state(st.after, args.machine) for st in r.trace]
    out.put(machine=args.machine, status=status, steps=r.steps, loop_from=r.loop_from,
            result=show_state(r.term, args.machine),
            trace=[{"index": i, "rule": st.rule, "state": s}
                   for i, (st, s) in enumerate(zip(r.trace, states))])
    if args.trace == "text":
        out.line(f"   0. {'load':<10} {show_state(load(args.machine, t), args.machine)}")
        out.lines += [f"{i + 1:4d}. {st.rule:<10} {s}" for i, (st, s) in enumerate(zip(r.trace, states))]
    out.line(f"status: {status}")
    out.line(f"steps: {r.steps}")
    out.line(f"result: {show_state(r.term, args.machine)}")
    return 0 if _expect(status, args.expect) else 1


_TRANSLATIONS = {
    ("cbv", "lkq"), ("cbv", "nj"), ("cbv", "llp"),
    ("cbn", "lkt"),
    ("lk", "lkq"), ("lk", "nj"), ("lk", "llp"),
    ("lkq", "nj"), ("lkq", "llp"), ("lkq", "lkt"),
    ("lkt", "lkq"),
    ("llp", "lkq"), ("llp", "nj"),
}
_TARGET_CALC = {"lkq": "lfoc", "lkt": "lkt", "llp": "llp", "nj": "nj"}
_SOURCE_CALC = {"cbv": "lam", "cbn": "lam", "lk": "lk", "lkq": "lfoc", "lkt": "lkt", "llp": "llp"}


def cmd_translate(args, out: Out) -> int:
    from . import translate as T
    from .lkq import mirror
    pair = (args.src, args.dst)
    if pair not in _TRANSLATIONS:
        ok = ", ".join(f"{a}->{b}" for a, b in sorted(_TRANSLATIONS))
        raise UsageError(f"no translation {args.src}->{args.dst}; available: {ok}")
    src = read_source(args)
    calc = _SOURCE_CALC[args.src]
    ctx = context_of(args, src, calc)
    if ctx.calculus != calc:
        raise UsageError(f"--from {args.src} reads the {calc} calculus, not {ctx.calculus}")
    t = parse_input(src, ctx)
    s, d = args.src, args.dst
    if s == "cbv":
        t, s = T.cbv_to_lkq(t), "lkq"
    elif s == "lk":
        t, s = T.lk_to_lkq(t), "lkq"
    elif s == "llp" and d == "lkq":
        t, s = T.llp_to_lkq(t), "lkq"
    if s == "cbn":
        r = T.cbn_to_lkt(t)
    elif s == "lkt":
        r = mirror(t)
    elif s == "llp":
        r = T.llp_to_nj(t)
    elif d == "lkq":
        r = t
    elif d == "nj":
        r = T.lkq_to_nj(t)
    elif d == "llp":
        r = T.lkq_to_llp(t, optimize=args.optimize)
    else:
        r = mirror(t)
    text = show(r, _TARGET_CALC[d])
    out.line(text)
    out.put(source=args.src, target=args.dst, optimize=args.optimize, term=text)
    return 0


def cmd_focalize(args, out: Out) -> int:
    from .synth import focalize_strong, typecheck_synth
    src = read_source(args)
    ctx = context_of(args, src)
    if ctx.calculus != "lfoc":
        raise UsageError("focalize reads the focalised calculus")
    t = parse_input(src, ctx)
    res = focalize_strong(t, ctx.gamma, ctx.delta, ctx.kind, ctx.formula)
    atoms = {x: P for x, P in res.gamma.items() if F.is_atomic(P)}
    A = typecheck_synth(res.term, atoms, res.delta, res.kind, res.formula)
    fs = F.show_formula(A) if A is not None else None
    term = show(res.term, "synth")
    seqs = [str(s) for s in res.sequents]
    if args.sequents:
        out.line("sequents:")
        out.lines += [f"  {s}" for s in seqs]
    if args.tree:
        out.line(f"tree: {show(res.tree, 'inter')}")
    out.line(term)
    out.line(f"typed ({res.kind}): {show_env(atoms)} |- {show_env(res.delta)}"
             + (f"  : {fs}" if fs else ""))
    out.put(term=term, kind=res.kind, formula=fs, sequents=seqs, tree=show(res.tree, "inter"),
            gamma=show_env(atoms), delta=show_env(res.delta))
    return 0


def cmd_match(args, out: Out) -> int:
    from .patterns import patterns_of, show_pat
    from .synth import bijection_check, leaf_map, match_trace
    src = read_source(args)
    args.calculus = args.calculus or "inter"
    ctx = context_of(args, src, "inter")
    C = parse_input(src, ctx)
    if args.copattern:
        q = parse_copattern(args.copattern)
        rows = [(show_pat(p), show(c, "inter")) for p, c in leaf_map(C, q)]
        ok = bijection_check(C, q)
        out.lines += [f"{p} -> {c}" for p, c in rows]
        out.line(f"bijection: {'yes' if ok else 'no'}")
        out.put(copattern=args.copattern, patterns=[show_pat(p) for p in patterns_of(q)],
                map=[{"pattern": p, "leaf": c} for p, c in rows], bijection=ok)
        if not ok:
            raise DomainFailure("the pattern to leaf map is not a bijection", out.data)
        return 0
    if not args.bind:
        raise UsageError("give --bind 'q := p' (repeatable) or --copattern q")
    binds = []
    for b in args.bind:
        q, sep, p = b.partition(":=")
        if not sep:
            raise UsageError(f"binding {b!r} must read 'q := p'")
        binds.append((parse_copattern(q.strip()), parse_pattern(p.strip())))
    res = match_trace(C, binds)
    out.lines += [f"  {s}" for s in res.steps]
    out.line(show(res.command, "inter"))
    out.put(steps=res.steps, path=list(res.path), result=show(res.command, "inter"))
    return 0


def cmd_lk(args, out: Out) -> int:
    from .lk import normalize_lk
    src = read_source(args)
    args.calculus = "lk"
    ctx = context_of(args, src, "lk")
    t = parse_input(src, ctx)
    if ctx.gamma or ctx.delta:
        typecheck_any(t, ctx)
    prefs = ["control-mu", "control-mu-tilde"] if args.both else [args.prefer]
    results = []
    for pref in prefs:
        r = normalize_lk(t, pref, args.fuel)
        results.append((pref, r))
        if args.trace == "text":
            out.line(f"{pref}:")
            out.lines += trace_text(r.trace, "lk")
        out.line(f"{pref}: {r.status} after {r.steps} steps: {show(r.term, 'lk')}")
    out.put(results=[{"prefer": p, "status": r.status, "steps": r.steps,
                      "result": show(r.term, "lk"), "trace": trace_json(r.trace, "lk")}
                     for p, r in results])
    if args.both:
        from .terms import alpha_eq
        distinct = not alpha_eq(results[0][1].term, results[1][1].term)
        out.line(f"distinct normal forms: {'yes' if distinct else 'no'}")
        out.put(distinct=distinct)
    return 0 if all(r.status == NORMAL for _, r in results) else 1


def cmd_prop(args, out: Out) -> int:
    from .props import property_run
    seed = seed_of(args)
    rep = property_run(args.suite, args.samples, seed, args.depth)
    out.line(str(rep))
    out.put(**rep.to_json())
    if not rep.ok:
        raise DomainFailure(f"{len(rep.failures)} failures", out.data)
    return 0


# ---------------------------------------------------------------- demos

def _demo_lafont(out: Out) -> bool:
    from .corpus import EXAMPLES
    from .lk import lafont_demo
    from .terms import alpha_eq
    e = EXAMPLES["lafont"]
    c1, c2 = parse("<x0|a0>", "lk"), parse("<y0|b0>", "lk")
    d, n1, n2 = lafont_demo(c1, c2, e.gamma, e.delta)
    distinct = not alpha_eq(n1, n2)
    out.line(f"critical pair:   {show(d, 'lk')}")
    out.line(f"mu first:        {show(n1, 'lk')}")
    out.line(f"mu-tilde first:  {show(n2, 'lk')}")
    out.line(f"distinct: {'yes' if distinct else 'no'}")
    out.put(command=show(d, "lk"), mu_first=show(n1, "lk"), mu_tilde_first=show(n2, "lk"),
            distinct=distinct)
    return distinct and alpha_eq(n1, c1) and alpha_eq(n2, c2)


def _demo_deltadelta(out: Out) -> bool:
    from .corpus import EXAMPLES, LAMBDA_PROGRAMS
    from .reduction import normalize
    from .terms import alpha_eq
    from .translate import cbv_to_lkq
    M = parse(LAMBDA_PROGRAMS["delta-delta"], "lam", "term")
    enc = cbv_to_lkq(M)
    shown = parse("mu g." + EXAMPLES["deltadelta"].text, "lfoc", "expr")
    same = alpha_eq(enc, shown)
    r = normalize(enc.body, fuel=200)
    out.line(f"encoding: {show(enc)}")
    out.line(f"matches the displayed term: {'yes' if same else 'no'}")
    out.line(f"reduction: {r.status} after {r.steps} steps")
    out.put(encoding=show(enc), matches_display=same, status=r.status, steps=r.steps,
            loop_from=r.loop_from, trace=trace_json(r.trace, "lfoc"))
    return same and r.status == LOOP


def _demo_iso(out: Out) -> bool:
    from .corpus import EXAMPLES
    from .lkq import eta_normalize
    from .reduction import normalize
    from .terms import alpha_eq
    e = EXAMPLES["iso-roundtrip"]
    r = normalize(e.term)
    final = eta_normalize(r.term)
    want = parse("<val x|a>")
    out.line(f"start: {show(e.term)}")
    out.lines += trace_text(r.trace, "lfoc")
    out.line(f"normal form: {show(r.term)}")
    out.line(f"after eta: {show(final)}")
    ok = r.status == NORMAL and alpha_eq(final, want) and r.steps <= 50
    out.put(start=show(e.term), status=r.status, steps=r.steps, normal_form=show(r.term),
            eta=show(final), trace=trace_json(r.trace, "lfoc"))
    return ok


def _demo_copairing(out: Out) -> bool:
    from .patterns import patterns_of, show_pat
    from .synth import bijection_check, collapse, leaf_map, typecheck_synth
    from .terms import MuQC
    q = parse_copattern("(x,[y,a^])")
    C = parse("[<val y|b> | y, a^ | <val x|d>]", "inter")
    rows = leaf_map(C, q)
    for p, c in rows:
        out.line(f"{show_pat(p)} -> {show(c, 'inter')}")
    ok = bijection_check(C, q)
    rec = collapse(MuQC(q, C))
    A = typecheck_synth(rec, {}, parse_env("b: Y, d: X"), "context", parse_formula("X * (Y + ~Q)"))
    out.line(f"record: {show(rec, 'synth')} : {F.show_formula(A)}")
    out.line(f"bijection: {'yes' if ok else 'no'}")
    out.put(patterns=[show_pat(p) for p in patterns_of(q)],
            map=[{"pattern": show_pat(p), "leaf": show(c, "inter")} for p, c in rows],
            record=show(rec, "synth"), bijection=ok)
    return ok and [show(c, "inter") for _, c in rows] == ["< val y | b >", "< val x | d >"]


def _demo_nonreflection(out: Out) -> bool:
    from .translate import nonreflection_demo
    from .terms import alpha_eq
    c1, c2, c3 = parse("<x0|a0>", "lk"), parse("<y0|b0>", "lk"), parse("<x1|a1>", "lk")
    src, img, nf, target, reached = nonreflection_demo(c1, c2, c3)
    out.line(f"source: {show(src, 'lk')}")
    out.line(f"translation: {show(img)}")
    out.line(f"translation reduces to: {show(nf)}")
    out.line(f"source reaches the second command: {'yes' if reached else 'no'}")
    out.put(source=show(src, "lk"), translation=show(img), normal_form=show(nf), source_reaches=reached)
    return alpha_eq(nf, target) and not reached


def _demo_double_negation(out: Out) -> bool:
    from .corpus import EXAMPLES
    from .translate import lkq_to_llp
    from .terms import alpha_eq
    t = EXAMPLES["double-negation"].term
    opt = lkq_to_llp(t, optimize=True)
    want = parse("down((~mu x.<k_a|down(x)>)^)", "llp", "context")
    out.line(f"source: {show(t)}")
    out.line(f"optimised: {show(opt, 'llp')}")
    out.line(f"unoptimised: {show(lkq_to_llp(t), 'llp')}")
    out.put(source=show(t), optimised=show(opt, "llp"), unoptimised=show(lkq_to_llp(t), "llp"))
    return alpha_eq(opt, want)


def _demo_alpha_clause(out: Out) -> bool:
    from .lam import eta_contract, nj_normalize
    from .terms import CoVar
    from .translate import factorization
    f = factorization(CoVar("a"))
    b = nj_normalize(f.factored)
    e = eta_contract(b)
    out.line(f"through LLP: {show(f.factored, 'nj')}")
    out.line(f"beta:        {show(b, 'nj')}")
    out.line(f"eta:         {show(e, 'nj')}")
    out.line(f"direct:      {show(f.direct, 'nj')}")
    out.put(factored=show(f.factored, "nj"), beta=show(b, "nj"), eta=show(e, "nj"),
            direct=show(f.direct, "nj"), equal=f.holds)
    return f.holds and show(e, "nj") == show(f.direct, "nj")


_DEMO_FN = {"lafont": _demo_lafont, "deltadelta": _demo_deltadelta, "iso": _demo_iso,
            "copairing": _demo_copairing, "nonreflection": _demo_nonreflection,
            "double-negation": _demo_double_negation, "alpha-clause": _demo_alpha_clause}


def cmd_demo(args, out: Out) -> int:
    ok = _DEMO_FN[args.name](out)
    out.put(demo=args.name, expected=ok)
    if not ok:
        raise DomainFailure(f"demo {args.name} did not give the expected outcome", out.data)
    return 0


# ---------------------------------------------------------------- argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=None, help="random seed (FOCAL_SEED wins)")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("file", nargs="?", help="input file")
    source.add_argument("-e", "--expr", help="inline input text")
    source.add_argument("--calculus", help=f"one of {', '.join(CALCULI)} (lkq = lfoc)")
    source.add_argument("--kind", help=f"one of {', '.join(KINDS)}")
    source.add_argument("--gamma", help="left context, e.g. 'x: X, y: ~X'")
    source.add_argument("--delta", help="right context, e.g. 'a: X'")
    source.add_argument("--formula", help="formula of the judgement")

    fuel = argparse.ArgumentParser(add_help=False)
    fuel.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    fuel.add_argument("--expect", choices=("normal", "loop", "any"), default="normal",
                      help="outcome counted as success")

    p = _Parser(prog="focal", description="Focalised sequent-calculus workbench.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("parse", parents=[common, source], help="parse and pretty-print a term")

    c = sub.add_parser("check", parents=[common, source], help="typecheck a term")
    c.add_argument("--derivation", action="store_true", help="print the rule tree")

    r = sub.add_parser("reduce", parents=[common, source, fuel], help="normalise a command")
    r.add_argument("--strategy", default="leftmost",
                   help="leftmost, rightmost, random, random:N, or position:P (contract at P, then leftmost)")
    r.add_argument("--trace", choices=("none", "text", "json"), default="none")
    r.add_argument("--eta", action="store_true", help="eta-normalise the result")
    r.add_argument("--unbundled", action="store_true", help="separate substitution steps")
    r.add_argument("--wn", action="store_true", help="degree-guided weak normalisation")
    r.add_argument("--prefer", default="control-mu", choices=("control-mu", "control-mu-tilde"),
                   help="rule priority for raw LK")
    r.add_argument("--check", action="store_true", help="typecheck before reducing")
    r.add_argument("--replay", metavar="TRACE.json", help="replay a recorded JSON trace")

    m = sub.add_parser("run", parents=[common, source, fuel], help="run an abstract machine")
    m.add_argument("--machine", choices=("cbn", "cbv", "lbarq"), required=True)
    m.add_argument("--trace", choices=("none", "text"), default="none")

    t = sub.add_parser("translate", parents=[common, source], help="translate between calculi")
    t.add_argument("--from", dest="src", required=True, choices=sorted(_SOURCE_CALC))
    t.add_argument("--to", dest="dst", required=True, choices=sorted(_TARGET_CALC))
    t.add_argument("--optimize", action="store_true", help="use the optimised LLP clauses")

    f = sub.add_parser("focalize", parents=[common, source], help="strongly focalise a term")
    f.add_argument("--tree", action="store_true", help="show the intermediate tree")
    f.add_argument("--sequents", action="store_true", help="show the normalised sequents")

    sub.add_parser("synth-check", parents=[common, source], help="typecheck a record-calculus term")

    mt = sub.add_parser("match", parents=[common, source], help="counterpattern matching")
    mt.add_argument("--bind", action="append", help="'q := p' (repeatable)")
    mt.add_argument("--copattern", help="list the leaf reached by every pattern of q")

    lk = sub.add_parser("lk", parents=[common, source], help="reduce a raw LK command")
    lk.add_argument("--prefer", default="control-mu", choices=("control-mu", "control-mu-tilde"))
    lk.add_argument("--both", action="store_true", help="run both priorities and compare")
    lk.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    lk.add_argument("--trace", choices=("none", "text"), default="none")

    d = sub.add_parser("demo", parents=[common], help="reproduce a worked example")
    d.add_argument("name", choices=DEMOS)

    from .props import SUITES
    pr = sub.add_parser("prop", parents=[common], help="run a property suite")
    pr.add_argument("suite", choices=SUITES)
    pr.add_argument("--samples", type=int, default=100)
    pr.add_argument("--depth", type=int, default=7)
    return p


_HANDLERS = {"parse": cmd_parse, "check": cmd_check, "reduce": cmd_reduce, "run": cmd_run,
             "translate": cmd_translate, "focalize": cmd_focalize, "match": cmd_match,
             "lk": cmd_lk, "demo": cmd_demo, "prop": cmd_prop,
             "synth-check": lambda a, o: cmd_check(a, o, force_calc="synth")}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    as_json = "--json" in (sys.argv[1:] if argv is None else argv)
    out = Out(as_json, stdout)

    def fail(code: int, kind: str, msg: str, **extra) -> int:
        if as_json:
            out.put(error={"type": kind, "message": msg, **extra})
            out.flush(ok=False)
        else:
            out.flush()
            stderr.write(f"error: {msg}\n")
        return code

    try:
        args = build_parser().parse_args(argv)
        code = _HANDLERS[args.command](args, out)
    except UsageError as exc:
        return fail(2, "usage", str(exc))
    except ParseError as exc:
        return fail(2, "parse", str(exc), line=exc.line, col=exc.col)
    except TypeCheckError as exc:
        return fail(1, "type", str(exc))
    except DomainFailure as exc:
        if as_json:
            out.put(**exc.payload)
        return fail(1, "failure", str(exc))
    except (ValueError, RuntimeError) as exc:
        return fail(1, type(exc).__name__, str(exc))
    out.flush(ok=code == 0)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
