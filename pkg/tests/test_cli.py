import json
import subprocess
import sys

import pytest
from hypothesis import given

from freesep import cli

from .conftest import F2, words


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_member(capsys):
    code, rep, err = run(["member", "--rank", "2", "--gens", "xYXyx,y", "--word", "x"], capsys)
    assert code == 0 and rep["outcome"]["member"] is False
    assert "member=false" in err
    assert run(["member", "--rank", "2", "--gens", "xYXyx,y", "--word", "y"], capsys)[1]["outcome"]["member"]
    assert run(["member", "--rank", "2", "--gens", "xYXyx,y", "--word", ""], capsys)[1]["outcome"]["member"]


def test_member_errors(capsys):
    code, rep, err = run(["member", "--rank", "2", "--gens", "xYXyx,y", "--word", "xq"], capsys)
    assert code == 2 and rep is None and "position 1" in err
    code, _, err = run(["member", "--rank", "2", "--gens", "xz", "--word", "x"], capsys)
    assert code == 2 and "position 1" in err


def test_isolated_exit_codes(capsys):
    code, rep, _ = run(["isolated", "--rank", "2", "--gens", "xYXyx,y", "--max-len", "6"], capsys)
    assert code == 0 and rep["witnesses"]["violations"] == []
    assert rep["parameters"]["exponents"] == [2, 3, 4, 5, 6]
    code, rep, _ = run(["isolated", "--rank", "2", "--gens", "xx,y", "--max-len", "1", "--exponents", "2"], capsys)
    assert code == 1
    assert {"root": "x", "exponent": 2} in rep["witnesses"]["violations"]
    code, rep, _ = run(["isolated", "--gens", "xxx", "--max-len", "1", "--exponents", "3"], capsys)
    assert code == 1 and rep["witnesses"]["violations"][0] == {"root": "x", "exponent": 3}


def test_isolated_pprime(capsys):
    code, rep, _ = run(["isolated", "--gens", "xxx", "--pprime", "2", "--max-len", "2"], capsys)
    assert code == 1
    assert rep["parameters"]["exponents"] == [3, 5]
    assert {"root": "x", "exponent": 3} in rep["witnesses"]["violations"]
    code, rep, _ = run(["isolated", "--gens", "xxx", "--pprime", "3", "--max-len", "4"], capsys)
    assert code == 0
    code, _, err = run(["isolated", "--gens", "xxx", "--pprime", "4"], capsys)
    assert code == 2 and "prime" in err


def test_witness(capsys):
    code, rep, _ = run(["witness", "--n", "4"], capsys)
    assert code == 0
    entries = rep["witnesses"]["reports"]
    assert [e["n"] for e in entries] == [2, 3, 4]
    assert entries[0]["witness_a"] == "a" and entries[0]["witness_x"] == "xYXyx"
    assert entries[1]["witness_a"] == "Bab"
    assert all(e["discrepancy_weight"] == f">={e['n']}" for e in entries)
    code, _, _ = run(["witness", "--n", "1"], capsys)
    assert code == 2


def test_psep(capsys):
    code, rep, _ = run(["psep", "--gens", "xYXyx,y", "--exclude", "x", "--p", "3", "--targets", "ut:3"], capsys)
    assert code == 0
    assert rep["counters"]["homs_total"] == 729 and rep["counters"]["homs_separating"] == 0
    code, rep, _ = run(["psep", "--gens", "xx,y", "--exclude", "x", "--p", "2", "--targets", "cyclic:2"], capsys)
    assert code == 1 and rep["counters"]["homs_separating"] > 0
    assert rep["witnesses"]["first_separating"] == {"target": "cyclic(2,2)", "images": {"x": 1, "y": 0}}
    code, _, err = run(["psep", "--gens", "xx", "--exclude", "x", "--p", "6"], capsys)
    assert code == 2
    code, _, err = run(["psep", "--gens", "xYXyx,y", "--exclude", "x", "--p", "3", "--targets", "ut:3", "--budget", "10"], capsys)
    assert code == 2 and "budget" in err


def test_separate(capsys):
    code, rep, _ = run(["separate", "--gens", "xYXyx,y", "--word", "x"], capsys)
    assert code == 0 and rep["outcome"]["separated"]
    code, rep, _ = run(["separate", "--rank", "2", "--gens", "x", "--word", "y"], capsys)
    assert rep["witnesses"]["permutation_rep"] == {"basepoint": 0, "degree": 2, "images": {"x": [0, 1], "y": [1, 0]}}
    code, _, err = run(["separate", "--gens", "xYXyx,y", "--word", "y"], capsys)
    assert code == 2 and "member" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["member", "--rank", "2", "--gens", "xYXyx,y", "--word", "xx"],
        ["isolated", "--gens", "xx,y", "--max-len", "3"],
        ["witness", "--n", "6"],
        ["psep", "--gens", "xx,y", "--exclude", "x", "--p", "2", "--targets", "cyclic:1-2,ut:3"],
        ["separate", "--gens", "xYXyx,y", "--word", "xyxY"],
    ],
)
def test_reports_reverify(argv, tmp_path, capsys):
    out = tmp_path / "r.json"
    cli.main(argv + ["--out", str(out), "--quiet"])
    report = json.loads(out.read_text())
    assert cli.verify_report(report) == []
    code, rep, _ = run(["verify", str(out)], capsys)
    assert code == 0 and rep["outcome"]["verified"]


def test_tampered_report_fails_verification(tmp_path, capsys):
    out = tmp_path / "r.json"
    cli.main(["separate", "--gens", "xYXyx,y", "--word", "x", "--out", str(out), "--quiet"])
    report = json.loads(out.read_text())
    imgs = report["witnesses"]["permutation_rep"]["images"]
    imgs["x"] = list(range(report["witnesses"]["permutation_rep"]["degree"]))
    assert cli.verify_report(report)


def test_reports_are_deterministic(capsys):
    argv = ["isolated", "--gens", "xx,yxY", "--max-len", "5", "--quiet"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv + ["--threads", "3", "--backend", "numpy"], capsys)
    a.pop("elapsed_seconds"), b.pop("elapsed_seconds")
    assert a == b


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("FREESEP_THREADS", "2")
    assert run(["witness", "--n", "3"], capsys)[0] == 0
    monkeypatch.setenv("FREESEP_THREADS", "two")
    assert run(["witness", "--n", "3"], capsys)[0] == 2


def test_unknown_flag_is_an_error(capsys):
    assert cli.main(["member", "--gens", "x", "--word", "x", "--bogus"]) == 2
    assert "unrecognized arguments" in capsys.readouterr().err


@pytest.mark.parametrize("cmd", ["member", "isolated", "witness", "psep", "separate", "verify"])
def test_help_documents_flags(cmd, capsys):
    assert cli.main([cmd, "--help"]) == 0
    text = capsys.readouterr().out
    parser = cli.build_parser()
    sub = parser._subparsers._group_actions[0].choices[cmd]
    for action in sub._actions:
        for opt in action.option_strings:
            assert opt in text
        if action.option_strings and action.dest != "help":
            assert action.help


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "freesep", "member", "--gens", "xYXyx,y", "--word", "x", "--quiet"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["outcome"]["member"] is False


@given(words(max_size=20))
def test_word_text_round_trip(u):
    assert F2.parse(F2.format(u)) == u
