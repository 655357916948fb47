import json
from pathlib import Path

import pytest

from hmeff.cli import main

PROGRAMS = str(Path(__file__).resolve().parent.parent / "programs") + "/"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_id_id(capsys):
    code, out, _ = run_cli(capsys, "check", PROGRAMS + "id_id.eff")
    assert code == 0
    assert out.splitlines() == ["val id : ∀α. α → α", "- : ∀α. α → α"]


def test_check_json(capsys):
    code, out, _ = run_cli(capsys, "check", PROGRAMS + "toggle.eff", "--json")
    data = json.loads(out)
    assert code == 0 and data["type"]["body"] == {"con": "bool"} and data["effects"] == []


def test_run_dyn_example(capsys):
    code, out, _ = run_cli(capsys, "run", PROGRAMS + "dyn_example.eff")
    assert code == 0 and out.strip() == "return 2"


def test_run_json(capsys):
    code, out, _ = run_cli(capsys, "run", PROGRAMS + "state.eff", "--json")
    data = json.loads(out)
    assert code == 0 and data["outcome"] == {"tag": "Terminal", "term": "return false"}


def test_h_div_local_is_a_type_error(capsys):
    code, _, err = run_cli(capsys, "check", PROGRAMS + "h_div.eff")
    assert code == 1 and "occurs" in err


def test_h_div_coarse_diverges(capsys):
    code, out, _ = run_cli(capsys, "run", PROGRAMS + "h_div.eff", "--mode", "coarse",
                           "--fuel", "100")
    assert code == 1 and "fuel exhausted" in out and "repeats" in out


def test_mismatched_state(capsys):
    assert run_cli(capsys, "run", PROGRAMS + "mismatched_state.eff")[0] == 1
    code, out, _ = run_cli(capsys, "run", PROGRAMS + "read_only.eff")
    assert code == 0 and out.strip() == "return 1"


def test_trace(capsys):
    code, out, _ = run_cli(capsys, "trace", PROGRAMS + "toggle.eff")
    lines = out.splitlines()
    assert code == 0 and lines[0].lstrip().startswith("0 ") and lines[-1] == "=> return true"
    code, out, _ = run_cli(capsys, "trace", PROGRAMS + "toggle.eff", "--json", "--limit", "2")
    assert len(json.loads(out)["steps"]) == 2


def test_translate_round_trip(capsys, tmp_path):
    target = tmp_path / "out.eff"
    code, _, _ = run_cli(capsys, "translate", PROGRAMS + "dyn_example.eff", "-o", str(target))
    assert code == 0
    code, out, _ = run_cli(capsys, "run", str(target))
    assert code == 0 and out.strip() == "return 2"
    code, out, _ = run_cli(capsys, "translate", PROGRAMS + "dyn_example.eff", "--to", "coarse")
    assert code == 0 and out.startswith("mode coarse;")


def test_translate_non_ground(capsys, tmp_path):
    code, _, err = run_cli(capsys, "translate", PROGRAMS + "proposition.eff")
    assert code == 1 and "translation error" in err
    target = tmp_path / "out.eff"
    code, _, _ = run_cli(capsys, "translate", PROGRAMS + "proposition.eff", "--to", "coarse",
                         "-o", str(target))
    assert code == 0
    assert run_cli(capsys, "check", str(target))[0] == 0


def test_translate_needs_params(capsys):
    assert run_cli(capsys, "translate", PROGRAMS + "toggle.eff")[0] == 1


def test_fixture(capsys):
    code, out, _ = run_cli(capsys, "fixture", "H_ST")
    assert code == 0 and "get(_ : unit; k)" in out
    code, out, _ = run_cli(capsys, "fixture", "T", "--json")
    assert json.loads(out)["name"] == "T"


def test_fuzz(capsys):
    code, out, _ = run_cli(capsys, "fuzz", "global-state", "--seeds", "5")
    assert code == 0 and out.splitlines()[-1] == "global-state (local): 5/5 passed"
    code, out, _ = run_cli(capsys, "fuzz", "safety", "--seeds", "3", "--mode", "none", "--json")
    assert json.loads(out)["summary"]["passed"] == 3


@pytest.mark.parametrize("argv", [
    [], ["frobnicate"], ["check"], ["run", PROGRAMS + "toggle.eff", "--fuel", "0"],
    ["fuzz", "safety", "--seeds", "-1"], ["check", "does/not/exist.eff"],
    ["fixture", "nope"],
])
def test_usage_errors(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    assert code == 2


def test_syntax_error(capsys, tmp_path):
    bad = tmp_path / "bad.eff"
    bad.write_text("return (\n")
    code, _, err = run_cli(capsys, "check", str(bad))
    assert code == 1 and err.startswith("syntax error: 2:")
