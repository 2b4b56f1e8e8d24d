import csv
import json
import subprocess
import sys

import pytest

from algpoints.cli import argv_from_config, config_of, main


def run(argv, tmp_path, capsys):
    code = main(list(argv) + [f"--out={tmp_path}", "--workers=1"])
    return code, capsys.readouterr()


def csv_rows(path):
    with open(path / "results.csv") as fh:
        echo = fh.readline()
        assert echo.startswith("# ")
        rows = list(csv.DictReader(fh))
    return json.loads(echo[2:]), rows


def strip_seconds(obj):
    if isinstance(obj, dict):
        return {k: strip_seconds(v) for k, v in obj.items() if k != "seconds"}
    if isinstance(obj, list):
        return [strip_seconds(v) for v in obj]
    return obj


def stable_outputs(path):
    echo, rows = csv_rows(path)
    for r in rows:
        r.pop("seconds")
    lines = [strip_seconds(json.loads(line)) for line in (path / "results.jsonl").read_text().splitlines()]
    return echo, rows, lines


# ---- examples --------------------------------------------------------------


def test_empty_rect_example(tmp_path, capsys):
    code, out = run(["empty-rect", "--p", "1", "--q", "1", "--n", "2", "--Q", "50"], tmp_path, capsys)
    assert code == 0
    assert "count=0" in out.out and "rectangle=" in out.out
    _, rows = csv_rows(tmp_path)
    assert rows[0]["count"] == "0" and rows[0]["uncertain"] == "0"


def test_count_rational_example(tmp_path, capsys):
    code, out = run(["count-rational", "--f", "x^2", "--J", "0,1", "--Q", "2", "--gamma", "1"], tmp_path, capsys)
    assert code == 0 and "count=2" in out.out


def test_short_grid_is_a_validation_error(tmp_path, capsys):
    argv = ["scaling", "--kind", "strip", "--n", "2", "--phi", "1/4*x^2 - 1/2", "--J", "0,1", "--gamma", "7/10", "--grid", "20"]
    code, out = run(argv, tmp_path, capsys)
    assert code == 1 and "error" in out.err


def test_unknown_flag_and_command_exit_one(tmp_path, capsys):
    assert run(["count-rect", "--bogus", "1"], tmp_path, capsys)[0] == 1
    assert run(["frobnicate"], tmp_path, capsys)[0] == 1
    assert main(["count-rect"]) == 1
    assert main(["--help"]) == 0


def test_hypothesis_violation_exits_one(tmp_path, capsys):
    code, out = run(["empty-rect", "--p", "2", "--q", "1", "--n", "2", "--Q", "10"], tmp_path, capsys)
    assert code == 1
    code, _ = run(["verify-upper", "--n", "2", "--Q", "5", "--d=1,1", "--gamma", "1/2"], tmp_path, capsys)
    assert code == 1


def test_csv_header_and_jsonl_mirror(tmp_path, capsys):
    code, _ = run(["count-rect", "--n", "2", "--Q", "1", "--box", "1/2,7/10,-17/10,-3/2"], tmp_path, capsys)
    assert code == 0
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert lines[1] == "Q,count,uncertain,mu2,bound,seconds"
    _, rows = csv_rows(tmp_path)
    js = [json.loads(line) for line in (tmp_path / "results.jsonl").read_text().splitlines()]
    assert len(js) == len(rows) == 1
    assert rows[0]["count"] == str(js[0]["count"]) == "1"
    assert js[0]["config"]["command"] == "count-rect"


@pytest.mark.parametrize(
    "argv, expect",
    [
        (["enumerate", "--n", "2", "--Q", "1", "--real-pairs", "--list"], "count=2"),
        (["count-strip", "--n", "2", "--Q", "1", "--phi", "-1 - x", "--J", "1/2,7/10", "--gamma", "9/10"], "count=1"),
        (["verify-upper", "--n", "2", "--Q", "10", "--d", "0,1", "--gamma", "4/5"], "holds=True"),
        (["special-square", "--Q", "10", "--d", "0,1", "--gamma", "3/4"], "L=6"),
        (["minkowski", "--x", "0,1", "--n", "2", "--Q", "10", "--d", "0,1"], "verified=True"),
        (["badset", "--n", "2", "--Q", "5", "--d=1/3,-1/4", "--gamma", "1/2", "--samples", "2000"], "area in"),
        (["scaling", "--kind", "rational", "--f", "x^2", "--J", "0,1", "--gamma", "1/2", "--grid", "10,20,40"], "slope="),
    ],
)
def test_commands_run_and_rerun_identically(argv, expect, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    code, out = run(argv, a, capsys)
    assert code == 0, out.err
    assert expect in out.out
    assert run(argv, b, capsys)[0] == 0
    assert stable_outputs(a) == stable_outputs(b)


def test_config_echo_round_trips(tmp_path, capsys):
    argv = ["count-rect", "--n", "2", "--Q", "3", "--d=-1/2,1", "--gamma", "3/5,4/5", "--c8", "2"]
    assert run(argv, tmp_path / "a", capsys)[0] == 0
    echo, _ = csv_rows(tmp_path / "a")
    assert echo == config_of(argv)
    replay = argv_from_config(echo)
    assert run(replay, tmp_path / "b", capsys)[0] == 0
    assert stable_outputs(tmp_path / "a")[1:] == stable_outputs(tmp_path / "b")[1:]
    assert config_of(replay) == echo


def test_runtime_knobs_are_not_echoed():
    cfg = config_of(["count-rect", "--n", "2", "--workers", "4", "--out=/tmp/x", "--seed", "3"])
    assert cfg == {"command": "count-rect", "options": {"n": "2", "seed": "3"}}


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "algpoints", "count-rational", "--f", "x^2", "--J", "0,1", "--Q", "2", "--gamma", "1", f"--out={tmp_path}"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "count=2" in proc.stdout
