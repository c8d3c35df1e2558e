"""
End-to-end tests for the command-line pipeline.
"""
import json

import pytest

from src.cli import ExitCode, categorize_error, run
from src.errors import (
    ConfigError,
    DataFormatError,
    DegenerateGeometryError,
    InfeasibleInstanceError,
    ShapeMismatchError,
    TrainingError,
)

SCENARIO = {
    "area_width": 200.0,
    "area_height": 200.0,
    "n_rx": 3,
    "tx_nodes": [
        {"position": [40.0, 100.0, 20.0], "kind": "base_station", "tx_power_dbm": 30.0},
        {"position": [160.0, 100.0, 20.0], "kind": "base_station", "tx_power_dbm": 30.0},
        {"position": [100.0, 180.0, 50.0], "kind": "ris_relay", "anchor_tx": 0, "gain_dbi": 60.0},
    ],
    "n_steps": 12,
    "step_size": 5.0,
    "seed": 3,
}

TRAIN = {"epochs_max": 2, "batch_size": 4, "network": {"hidden_sizes": [8], "time_steps": 4}}


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "scenario.json").write_text(json.dumps(SCENARIO))
    (tmp_path / "train.json").write_text(json.dumps(TRAIN))
    return tmp_path


def generate_and_label(d, jobs=1, suffix=""):
    ds, lab = d / f"ds{suffix}.jsonl", d / f"lab{suffix}.jsonl"
    assert run(["generate", "--config", str(d / "scenario.json"), "--out", str(ds), "--jobs", str(jobs)]) == 0
    assert run(["label", "--in", str(ds), "--out", str(lab), "--limit", "2", "--jobs", str(jobs)]) == 0
    return ds, lab


def test_oracle_prints_solution(capsys):
    assert run(["oracle", "--rates", "[[5,1],[4,2],[3,3]]", "--limit", "2"]) == 0
    assert capsys.readouterr().out == "[0,0,1] 12\n"


def test_oracle_tie_break_and_default_limit(capsys):
    assert run(["oracle", "--rates", "[[5,1],[4,2],[3,3]]", "--limit", "3"]) == 0
    assert capsys.readouterr().out == "[0,0,0] 12\n"
    assert run(["oracle", "--rates", "[[5,1],[4,2],[3,3]]"]) == 0
    assert capsys.readouterr().out == "[0,0,0] 12\n"


def test_oracle_infeasible_exit_code(capsys):
    assert run(["oracle", "--rates", "[[5,1],[4,2],[3,3]]", "--limit", "1"]) == ExitCode.INFEASIBLE
    err_lines = capsys.readouterr().err.strip().splitlines()
    assert err_lines[-1].startswith("error=infeasible message=")


def test_oracle_bad_rates(capsys):
    assert run(["oracle", "--rates", "[[5,1],[4"]) == ExitCode.CONFIG_ERROR
    assert run(["oracle", "--rates", "[[5,-1]]"]) == ExitCode.CONFIG_ERROR


def test_argument_errors_exit_2():
    assert run([]) == 2
    assert run(["train", "--model", "sideways", "--in", "x", "--out", "y"]) == 2


def test_generate_writes_one_line_per_step(workdir):
    ds, _ = generate_and_label(workdir)
    assert len(ds.read_text().splitlines()) == SCENARIO["n_steps"]


def test_generate_seed_flag_overrides_file(workdir):
    a, b = workdir / "a.jsonl", workdir / "b.jsonl"
    cfg = str(workdir / "scenario.json")
    assert run(["generate", "--config", cfg, "--out", str(a), "--seed", "3"]) == 0
    assert run(["generate", "--config", cfg, "--out", str(b), "--seed", "4"]) == 0
    assert a.read_bytes() != b.read_bytes()
    run(["generate", "--config", cfg, "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_label_with_zero_limit_is_infeasible(workdir):
    ds, _ = generate_and_label(workdir)
    assert run(["label", "--in", str(ds), "--limit", "0", "--out", str(workdir / "x.jsonl")]) == ExitCode.INFEASIBLE


def test_missing_and_invalid_inputs(workdir):
    assert run(["label", "--in", str(workdir / "nope.jsonl"), "--out", str(workdir / "x")]) == ExitCode.IO_ERROR
    bad = workdir / "bad.json"
    bad.write_text(json.dumps({**SCENARIO, "n_rx": 0}))
    assert run(["generate", "--config", str(bad), "--out", str(workdir / "x")]) == ExitCode.CONFIG_ERROR
    assert run(["generate", "--config", str(workdir / "none.json"), "--out", str(workdir / "x")]) == ExitCode.CONFIG_ERROR


def test_full_pipeline_is_byte_identical(workdir, capsys):
    outputs = []
    for attempt, jobs in enumerate([1, 1, 4]):
        d = workdir
        _, lab = generate_and_label(d, jobs=jobs, suffix=str(attempt))
        ckpt = d / f"model{attempt}.json"
        hist = d / f"hist{attempt}.csv"
        assert run(["train", "--model", "bottomup", "--in", str(lab), "--out", str(ckpt),
                    "--config", str(d / "train.json"), "--history", str(hist)]) == 0
        rep_json, rep_csv = d / f"rep{attempt}.json", d / f"rep{attempt}.csv"
        capsys.readouterr()
        assert run(["eval", "--model", str(ckpt), "--in", str(lab), "--json", str(rep_json),
                    "--csv", str(rep_csv), "--jobs", str(jobs)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["instances"] == SCENARIO["n_steps"]
        outputs.append([p.read_bytes() for p in (d / f"ds{attempt}.jsonl", lab, ckpt, hist, rep_json, rep_csv)])
    assert outputs[0] == outputs[1] == outputs[2]


def test_eval_rejects_mismatched_checkpoint(workdir):
    _, lab = generate_and_label(workdir)
    ckpt = workdir / "td.json"
    assert run(["train", "--model", "topdown", "--in", str(lab), "--out", str(ckpt),
                "--config", str(workdir / "train.json")]) == 0
    other = workdir / "other.json"
    other.write_text(json.dumps({**SCENARIO, "n_rx": 2}))
    ds2, lab2 = workdir / "ds2.jsonl", workdir / "lab2.jsonl"
    assert run(["generate", "--config", str(other), "--out", str(ds2)]) == 0
    assert run(["label", "--in", str(ds2), "--out", str(lab2)]) == 0
    assert run(["eval", "--model", str(ckpt), "--in", str(lab2)]) == ExitCode.IO_ERROR


@pytest.mark.parametrize("exc, code", [
    (InfeasibleInstanceError("n > m*l", step=2), ExitCode.INFEASIBLE),
    (ConfigError("bad"), ExitCode.CONFIG_ERROR),
    (DegenerateGeometryError("zero distance"), ExitCode.CONFIG_ERROR),
    (TrainingError("no training performed"), ExitCode.CONFIG_ERROR),
    (DataFormatError("truncated"), ExitCode.IO_ERROR),
    (ShapeMismatchError("3 x 2 vs 2 x 2"), ExitCode.IO_ERROR),
    (FileNotFoundError("x"), ExitCode.IO_ERROR),
    (RuntimeError("boom"), ExitCode.UNEXPECTED),
])
def test_categorize_error(exc, code):
    assert categorize_error(exc) == code


@pytest.mark.parametrize("name", ["SPIKE_ASSOC_JOBS", "SPIKE_ASSOC_SEED"])
def test_non_integer_environment_is_a_config_error(monkeypatch, capsys, name):
    monkeypatch.setenv(name, "four")
    assert run(["oracle", "--rates", "[[5,1],[4,2],[3,3]]", "--limit", "2"]) == ExitCode.CONFIG_ERROR
    captured = capsys.readouterr()
    assert captured.out == ""
    last = captured.err.strip().splitlines()[-1]
    assert last.startswith("error=config message=")
    assert name in last
