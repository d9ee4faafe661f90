import pytest

from focal import formula as F
from focal.corpus import EXAMPLES, MUTANTS, lambda_corpus, typed_corpus
from focal.gen import (
    DELTA0, GAMMA0, LLP_GAMMA0, X, all_formulas, all_trees, copattern_for, lfoc_commands,
    llp_commands,
)
from focal.llp import llp_typecheck
from focal.parser import parse
from focal.props import (
    BIJECTION_LEAF, SUITES, Report, bijection_run, confluent_pair, phase_cycle_lint, property_run,
    shrink,
)
from focal.reduction import normalize
from focal.terms import Cmd, positions
from focal.typing import infer


def test_generators_are_reproducible():
    assert lfoc_commands(7, 5) == lfoc_commands(7, 5)
    assert lfoc_commands(7, 5) != lfoc_commands(8, 5)


def test_generated_commands_are_typed():
    for c in lfoc_commands(3, 50):
        infer(c, "command", GAMMA0, DELTA0)
    for c in llp_commands(3, 50):
        llp_typecheck(c, LLP_GAMMA0)


def test_depth_bounds_command_nesting():
    def nesting(t):
        here = 1 if isinstance(t, Cmd) else 0
        from focal.terms import children
        return here + max((nesting(s) for s in children(t)), default=0)
    for c in lfoc_commands(0, 30, depth=3):
        assert nesting(c) <= 4


def test_formula_enumeration_counts():
    # sizes 1..4 over one atom: 1, 1, 3, 7
    assert [len(list(all_formulas(n))) for n in range(1, 5)] == [1, 1, 3, 7]
    assert all(F.size(P) == 4 for P in all_formulas(4))


def test_trees_for_a_plain_pair_are_just_the_leaf():
    q = copattern_for(F.Tensor(X, X))
    assert list(all_trees(q, BIJECTION_LEAF)) == [BIJECTION_LEAF]


def test_corpus_sizes():
    assert len(lambda_corpus()) == 15
    corpus = typed_corpus()
    assert len(corpus) == 30
    assert len({e.name for e in corpus}) == 30
    assert {"factor-cut", "factor-val", "factor-covar"} <= {e.name for e in corpus}
    assert set(MUTANTS) and set(EXAMPLES)


def test_confluent_pair_on_example():
    assert confluent_pair(EXAMPLES["iso-roundtrip"].term, 0) is None


def test_phase_cycle_lint_on_normal_forms():
    for c in lfoc_commands(5, 40):
        assert phase_cycle_lint(normalize(c).term) == []


def test_phase_cycle_lint_flags_cut():
    assert phase_cycle_lint(parse("<mu a.<val x|a> | b>"))


def test_shrink_finds_smaller_failing_subcommand():
    c = parse("<val x0 | ~mu z.<val x0 | ~mu w.<val w|a0>>>")
    small = shrink(c, lambda t: isinstance(t, Cmd) and "w" in str(t))
    assert len(list(positions(small))) < len(list(positions(c)))


@pytest.mark.parametrize("suite", [s for s in SUITES if s != "bijection"])
def test_property_suites_report_no_failures(suite):
    rep = property_run(suite, samples=15, seed=1, depth=4)
    assert isinstance(rep, Report)
    assert rep.ok, str(rep)


def test_bijection_suite_small():
    rep = bijection_run(samples=20, seed=2, exhaustive_size=4, max_size=6)
    assert rep.ok and rep.samples > 20


def test_unknown_suite():
    with pytest.raises(ValueError):
        property_run("nonsense")


def test_report_json_shape():
    rep = property_run("mirror", samples=3)
    assert rep.to_json() == {"suite": "mirror", "samples": 3, "seed": 0, "failures": []}
