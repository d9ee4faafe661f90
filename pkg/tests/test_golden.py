"""Byte-identical CLI output for the example files.

Regenerate with ``FOCAL_UPDATE_GOLDEN=1 pytest tests/test_golden.py``.
"""
import io
import os
from pathlib import Path

import pytest

from focal.cli import main

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "golden"

CASES = {
    "pair-neg-value.check": ["check", "--derivation", "corpus/pair-neg-value.lfoc"],
    "excluded-middle.check": ["check", "--derivation", "corpus/excluded-middle.lfoc"],
    "swap-context.check": ["check", "--derivation", "corpus/swap-context.lfoc"],
    "iso-roundtrip.reduce": ["reduce", "--trace=text", "--eta", "corpus/iso-roundtrip.lfoc"],
    "iso-roundtrip.trace.json": ["reduce", "--trace=json", "corpus/iso-roundtrip.lfoc"],
    "deltadelta.reduce": ["reduce", "--trace=text", "--fuel=1000", "--expect=loop",
                          "corpus/deltadelta.lfoc"],
    "lafont.lk": ["lk", "--both", "--trace=text", "corpus/lafont.lk"],
    "double-negation.llp": ["translate", "--from=lkq", "--to=llp", "--optimize",
                            "corpus/double-negation.lfoc"],
    "deltadelta.cbv": ["translate", "--from=cbv", "--to=lkq", "corpus/delta-delta.lam"],
    "two-plus-two.cbn": ["run", "--machine=cbn", "--trace=text", "corpus/two-plus-two.lam"],
    "K.cbv": ["run", "--machine=cbv", "--trace=text", "corpus/K.lam"],
    "copairing-tree.match": ["match", "--copattern", "(x,[y,a^])", "corpus/copairing-tree.inter"],
    "swap-context.focalize": ["focalize", "--tree", "corpus/swap-context.lfoc"],
    "demo.lafont": ["demo", "lafont"],
    "demo.alpha-clause": ["demo", "alpha-clause"],
}


def _output(argv):
    buf, err = io.StringIO(), io.StringIO()
    cwd = os.getcwd()
    os.chdir(ROOT)
    try:
        code = main(argv, stdout=buf, stderr=err)
    finally:
        os.chdir(cwd)
    return f"exit {code}\n" + buf.getvalue() + err.getvalue()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_output(name):
    got = _output(CASES[name])
    path = GOLDEN / name
    if os.environ.get("FOCAL_UPDATE_GOLDEN"):
        path.write_text(got)
    assert path.read_text() == got


@pytest.mark.parametrize("name", ["iso-roundtrip.reduce", "deltadelta.reduce"])
def test_repeated_runs_identical(name):
    assert _output(CASES[name]) == _output(CASES[name])
