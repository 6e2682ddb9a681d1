import json

import pytest

from loopforms.cli import emit_report, main, parse_report
from loopforms.suite import REGISTRY, RunConfig, run_check

FAST = ["--trials", "2", "--samples", "64", "--steps", "64"]


def test_single_check_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["--check", "C8", "--samples", "512", "--trials", "2", "-o", str(out)]) == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["version"] and doc["config"]["N"] == 512
    assert [r["name"] for r in doc["results"]] == ["C8"]
    assert out.read_text().endswith("\n")


def test_repeated_check_flag(capsys):
    assert main(["--check", "C2", "--check", "C13"] + FAST) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [r["name"] for r in doc["results"]] == ["C2", "C13"]


@pytest.mark.parametrize("argv", [["--samples", "31"], ["--fd-step", "0.5"], ["--check", "C0"],
                                  ["--connection", "nope"], ["--report", "xml"], ["--bogus"]])
def test_usage_errors_exit_two(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_failing_check_exits_one(capsys):
    assert main(["--check", "C16", "--x", "0"] + FAST) == 1


def test_markdown_has_one_row_per_check(capsys):
    assert main(["--check", "C4", "--check", "C16", "--report", "md"] + FAST) == 0
    text = capsys.readouterr().out
    for name in ("C4", "C16"):
        rows = [line for line in text.splitlines() if line.startswith(f"| {name} |")]
        assert len(rows) == 1 and REGISTRY[name].anchor in rows[0]
    assert "rotations, reparameterizations" in text


def test_empty_report_is_valid():
    doc = json.loads(emit_report([], "json"))
    assert doc["results"] == []
    assert emit_report([], "md").startswith("#")


def test_report_round_trip():
    cfg = RunConfig(trials=2, N=64, S=64)
    results = [run_check(n, cfg) for n in ("C2", "C17")]
    config, back = parse_report(emit_report(results, "json", cfg.echo()))
    assert back == results and config == cfg.echo()


def test_convergence_table(capsys):
    assert main(["--convergence", "C6", "--trials", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["convergence"]["rows"]) == 3
    assert all(3.5 <= q <= 4.5 for q in doc["convergence"]["ratios"])
