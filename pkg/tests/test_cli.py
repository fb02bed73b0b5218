import json
from pathlib import Path

import pytest

from schoolmatch.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code = main(["--format", "json-like", *argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


def fix(name):
    return str(FIXTURES / f"{name}.txt")


def test_solve_da(capsys):
    code, report = run_json(capsys, "solve", "--mechanism", "da", fix("scp1"))
    assert code == 0
    assert report["matching"] == {"i1": "s1", "i2": "s2", "i3": "s3"}
    assert report["preference_index"] == 4
    assert report["stable"] is True


def test_solve_eadam_removals(capsys):
    code, report = run_json(
        capsys, "solve", "--mechanism", "eadam", "--consent", "all", fix("scp3")
    )
    assert code == 0
    assert report["preference_index"] == 3
    assert [(r["student"], r["school"]) for r in report["removals"]] == [
        ("i5", "s4"), ("i5", "s2"), ("i5", "s5")
    ]


def test_solve_tadam_scp6(capsys):
    code, report = run_json(capsys, "solve", "--mechanism", "tadam", fix("scp6"))
    assert code == 0
    assert report["preference_index"] == 2


def test_solve_cim_auto(capsys):
    code, report = run_json(capsys, "solve", "--mechanism", "cim", fix("scp2"))
    assert code == 0
    assert report["preference_index"] == 6
    assert report["verified"] is True


def test_solve_cim_coalition_file(tmp_path, capsys):
    coalition = tmp_path / "coalition.txt"
    coalition.write_text("loop i1 i2 i4\n")
    code, report = run_json(
        capsys, "solve", "--mechanism", "cim",
        "--coalition", str(coalition), fix("scp2"),
    )
    assert code == 0
    assert report["matching"]["i1"] == "s2"
    assert report["verified"] is True


def test_trace_table(capsys):
    code, out = run(capsys, "trace", fix("scp3"))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split() == ["step", "s1", "s2", "s3", "s4", "s5"]
    assert len(lines) == 14  # header + 12 steps + outcome
    assert "-i3-" in lines[1]  # struck reject in step 1
    assert lines[-1].startswith("outcome:")


def test_enumerate_tadam(capsys):
    code, report = run_json(capsys, "enumerate", "--what", "tadam", fix("scp2"))
    assert code == 0
    assert report["count"] == 3
    assert all(m["preference_index"] == 6 for m in report["matchings"])


def test_enumerate_stable(capsys):
    code, report = run_json(capsys, "enumerate", "--what", "stable", fix("scp1"))
    assert code == 0
    assert report["count"] == 1


def test_enumerate_coalitions(capsys):
    code, report = run_json(capsys, "enumerate", "--what", "coalitions", fix("scp3"))
    assert code == 0
    indices = {o["preference_index"] for o in report["outcomes"]}
    assert {3, 7} <= indices


def test_analyze(tmp_path, capsys):
    matching = tmp_path / "m.txt"
    matching.write_text("i1 s2\ni2 s1\ni3 s3\n")
    code, report = run_json(
        capsys, "analyze", "--matching", str(matching), fix("scp1")
    )
    assert code == 0
    assert report["preference_index"] == 2
    assert report["stable"] is False
    assert report["dominates_baseline"] is True
    assert report["efficient"] is True
    assert report["reasonably_fair"] is True


def test_graph_dot(capsys):
    code, out = run(capsys, "graph", fix("scp2"))
    assert code == 0
    assert out.startswith("digraph")
    assert '"i5" -> "i1"' in out


def test_strategy_anonymity(capsys):
    code, report = run_json(
        capsys, "strategy", "--check", "anonymity", "--trials", "20",
        "--seed", "5",
    )
    assert code == 0
    assert report["failures"] == 0


def test_strategy_dominance(capsys):
    code, report = run_json(
        capsys, "strategy", "--check", "dominance", "--trials", "300",
        "--seed", "5", "--family", "2x2",
    )
    assert code == 0
    assert report["verdict"] in ("dominates", "inconclusive")


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("students i1\nschools s1\n")
    code = main(["solve", "--mechanism", "da", str(bad)])
    assert code == 1


def test_text_format_solve(capsys):
    code, out = run(capsys, "solve", "--mechanism", "ttc", fix("scp5"))
    assert code == 0
    assert "preference_index: 3" in out
