import io
import json

import pytest

from focal.cli import main

from pathlib import Path

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def run(*argv, env=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_check_accepts_displayed_value():
    code, out, _ = run("check", "--calculus=lkq", str(CORPUS / "pair-neg-value.lfoc"))
    assert code == 0 and "~(P * ~P)" in out


def test_check_rejects_mutant():
    code, _, err = run("check", str(CORPUS / "swap-context-mutant.lfoc"))
    assert code == 1 and "error" in err


def test_self_application_loops():
    code, out, _ = run("reduce", "--fuel=1000", str(CORPUS / "deltadelta.lfoc"))
    assert code == 1 and "LoopDetected" in out


def test_expect_loop_turns_loop_into_success():
    code, _, _ = run("reduce", "--expect=loop", str(CORPUS / "deltadelta.lfoc"))
    assert code == 0


def test_demo_lafont_prints_two_normal_forms():
    code, out, _ = run("demo", "lafont")
    assert code == 0
    assert "< x0 | a0 >" in out and "< y0 | b0 >" in out


@pytest.mark.parametrize("name", ["deltadelta", "iso", "copairing", "nonreflection",
                                  "double-negation", "alpha-clause"])
def test_demos_succeed(name):
    assert run("demo", name)[0] == 0


def test_exactly_one_input():
    assert run("parse")[0] == 2
    assert run("parse", str(CORPUS / "pair-neg-value.lfoc"), "-e", "x")[0] == 2


def test_parse_error_exit_code_and_json():
    code, out, _ = run("parse", "--json", "-e", "<val x|a")
    assert code == 2
    doc = json.loads(out)
    assert doc["ok"] is False and doc["error"]["type"] == "parse" and doc["error"]["line"] == 1


def test_unknown_flag_rejected():
    assert run("parse", "--frobnicate", "-e", "<val x|a>")[0] == 2


def test_unknown_subcommand():
    assert run("bogus")[0] == 2


def test_missing_file():
    assert run("parse", "/nonexistent/file.lfoc")[0] == 2


def test_directives_feed_the_context(tmp_path):
    f = tmp_path / "t.lfoc"
    f.write_text("--! gamma: x: X\n--! delta: a: X\n<val x|a>\n")
    assert run("check", str(f))[0] == 0
    assert run("check", str(f), "--delta", "a: Y")[0] == 1


def test_reduce_json_trace_round_trips(tmp_path):
    code, out, _ = run("reduce", "--json", str(CORPUS / "iso-roundtrip.lfoc"))
    assert code == 0
    doc = json.loads(out)
    assert doc["status"] == "Normal" and doc["steps"] == 5 and len(doc["trace"]) == 5
    assert {"index", "rule", "position", "before", "after"} <= set(doc["trace"][0])
    trace = tmp_path / "trace.json"
    trace.write_text(out)
    code, out2, _ = run("reduce", "--replay", str(trace), str(CORPUS / "iso-roundtrip.lfoc"))
    assert code == 0 and doc["result"] in out2


def test_replay_mismatch_fails(tmp_path):
    _, out, _ = run("reduce", "--json", str(CORPUS / "iso-roundtrip.lfoc"))
    doc = json.loads(out)
    doc["trace"][0]["rule"] = "logical-not"
    trace = tmp_path / "bad.json"
    trace.write_text(json.dumps(doc))
    assert run("reduce", "--replay", str(trace), str(CORPUS / "iso-roundtrip.lfoc"))[0] == 1


def test_reduce_eta():
    code, out, _ = run("reduce", "--eta", str(CORPUS / "iso-roundtrip.lfoc"))
    assert code == 0 and "result: < val x | a >" in out


def test_reduce_text_trace():
    code, out, _ = run("reduce", "--trace=text", "-e", "<mu b.<val x|b> | a>")
    assert code == 0 and "control-mu" in out


def test_weak_normalisation_flag():
    code, out, _ = run("reduce", "--wn", "--gamma", "x: X", "--delta", "a: X",
                       "-e", "<val x | ~mu y.<val y|a>>")
    assert code == 0 and "< val x | a >" in out


def test_random_strategy_uses_seed(monkeypatch):
    monkeypatch.setenv("FOCAL_SEED", "5")
    assert run("reduce", "--strategy=random", str(CORPUS / "iso-roundtrip.lfoc"))[0] == 0


def test_run_machines():
    code, out, _ = run("run", "--machine=cbv", str(CORPUS / "K.lam"))
    assert code == 0 and "< \\a.a | [] >" in out
    assert run("run", "--machine=cbn", str(CORPUS / "delta-delta.lam"))[0] == 1
    assert run("run", "--machine=lbarq", "-e", "<mu b.<val y|b> | a>")[0] == 0


def test_translate_pairs():
    code, out, _ = run("translate", "--from=cbv", "--to=lkq", "-e", r"\x.x")
    assert code == 0 and out.startswith("val (~mu")
    code, out, _ = run("translate", "--from=lkq", "--to=llp", "--optimize",
                       str(CORPUS / "double-negation.lfoc"))
    assert out.strip() == "down((~mu x.< k_a | down(x) >)^)"
    assert run("translate", "--from=lk", "--to=nj", str(CORPUS / "lafont.lk"))[0] == 0
    assert run("translate", "--from=cbn", "--to=lkt", "-e", r"(\x.x) y")[0] == 0


def test_translate_unknown_pair():
    assert run("translate", "--from=cbn", "--to=nj", "-e", "x")[0] == 2


def test_focalize_and_synth_check(tmp_path):
    code, out, _ = run("focalize", "--json", "--gamma", "x: X + Y", "--delta", "a: X + Y",
                       "-e", "<val x | ~mu y.<val y|a>>")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "context" and len(doc["sequents"]) == 2
    f = tmp_path / "r.synth"
    f.write_text("--! kind: context\n--! delta: a: X + Y\n" + doc["term"] + "\n")
    assert run("synth-check", str(f))[0] == 0


def test_match_with_bindings_and_map():
    code, out, _ = run("match", str(CORPUS / "copairing-tree.inter"), "--bind", "(x,[y,a^]) := (x, inl y)")
    assert code == 0 and out.strip().endswith("< val y | b >")
    code, out, _ = run("match", str(CORPUS / "copairing-tree.inter"), "--copattern", "(x,[y,a^])")
    assert code == 0 and "bijection: yes" in out
    assert run("match", str(CORPUS / "copairing-tree.inter"), "--bind", "(x,[y,a^]) := (x,(y,z))")[0] == 1


def test_lk_both_priorities():
    code, out, _ = run("lk", "--both", str(CORPUS / "lafont.lk"))
    assert code == 0 and "distinct normal forms: yes" in out


def test_prop_runs_and_respects_seed(monkeypatch):
    code, out, _ = run("prop", "confluence", "--samples", "5", "--seed", "4", "--json")
    assert code == 0 and json.loads(out)["seed"] == 4
    monkeypatch.setenv("FOCAL_SEED", "9")
    code, out, _ = run("prop", "mirror", "--samples", "3", "--seed", "4", "--json")
    assert json.loads(out)["seed"] == 9


def test_bad_seed_env(monkeypatch):
    monkeypatch.setenv("FOCAL_SEED", "x")
    assert run("prop", "mirror", "--samples", "1")[0] == 2


def test_output_is_deterministic():
    a = run("demo", "iso")[1]
    b = run("demo", "iso")[1]
    assert a == b


def test_position_strategy_contracts_there_first():
    code, out, _ = run("reduce", "--json", "--strategy=position:", str(CORPUS / "iso-roundtrip.lfoc"))
    doc = json.loads(out)
    assert code == 0 and doc["trace"][0]["position"] == [] and doc["steps"] == 5
    assert run("reduce", "--strategy=position:1", str(CORPUS / "iso-roundtrip.lfoc"))[0] == 1
