"""
Tests for the confusion matrix, evaluation identities and report files.
"""
import csv
import json
from pathlib import Path

import numpy as np
import pytest

from src.errors import DataFormatError, ShapeMismatchError
from src.evaluation import CSV_HEADER, confusion_matrix, evaluate, write_report
from src.models import Standardizer, TopDownModel, default_spec
from src.oracle import LabeledInstance, label_dataset, solve_optimal
from src.scenario import Instance, generate_dataset, load_scenario_config
from src.snn import init_weights
from src.training import train, train_config_from_dict

EXAMPLE_RATES = [[5.0, 1.0], [4.0, 2.0], [3.0, 3.0]]
TINY_NET = {"hidden_sizes": (4,), "time_steps": 3, "dropout": 0.0}
DEFAULT_SCENARIO = Path(__file__).resolve().parents[3] / "configs" / "scenario.json"


def fixed_model(pred, m, limit=2):
    """Top-down model whose output biases alone pick ``pred``, whatever the input."""
    n = len(pred)
    spec = default_spec("topdown", n, m, TINY_NET)
    w = init_weights(spec, 0).zeros_like()
    bias = np.zeros((n, m))
    bias[np.arange(n), list(pred)] = 1.0
    w.layers[-1].b[:] = bias.ravel()
    return TopDownModel(spec=spec, weights=w, standardizer=Standardizer(0.0, 1.0), n_rx=n, n_tx=m, limit=limit)


def labeled(rates, optimal, limit, step=0):
    rates = np.asarray(rates, dtype=float)
    total = float(sum(rates[i, j] for i, j in enumerate(optimal)))
    return LabeledInstance(step=step, rates=rates, optimal=tuple(optimal), optimal_total=total, limit=limit)


def random_labeled(count, n=4, m=3, limit=2, seed=0):
    rng = np.random.default_rng(seed)
    items = []
    for step in range(count):
        rates = rng.uniform(0, 1e7, size=(n, m))
        optimal, total = solve_optimal(rates, limit)
        items.append(LabeledInstance(step=step, rates=rates, optimal=optimal, optimal_total=total, limit=limit))
    return items


# --- confusion matrix ----------------------------------------------------------

def test_confusion_identical_lists():
    labels = [0, 2, 2, 1, 0, 2]
    counts = confusion_matrix(labels, labels, 3)
    np.testing.assert_array_equal(counts, np.diag([2, 1, 3]))


def test_confusion_empty_and_total():
    np.testing.assert_array_equal(confusion_matrix([], [], 2), np.zeros((2, 2)))
    assert confusion_matrix([0, 1, 1, 0, 1], [1, 1, 0, 0, 0], 2).sum() == 5


def test_confusion_rejects_mismatch():
    with pytest.raises(ShapeMismatchError):
        confusion_matrix([0, 1], [0], 2)
    with pytest.raises(ShapeMismatchError):
        confusion_matrix([0, 2], [0, 1], 2)


# --- evaluate --------------------------------------------------------------------

def test_perfect_predictions():
    item = labeled(EXAMPLE_RATES, (0, 0, 1), limit=2)
    report = evaluate(fixed_model((0, 0, 1), 2), [item])
    record = report.records[0]
    assert record.per_rx_accuracy == 1.0
    assert record.instance_exact == 1
    assert record.rate_error == 0.0
    np.testing.assert_array_equal(report.confusion, [[2, 0], [0, 1]])
    assert report.summary["mean_per_rx_accuracy"] == 1.0


def test_half_right_confusion():
    item = labeled([[1.0, 2.0], [3.0, 4.0]], (0, 1), limit=2)
    report = evaluate(fixed_model((1, 1), 2), [item])
    assert report.records[0].per_rx_accuracy == 0.5
    assert report.records[0].instance_exact == 0
    np.testing.assert_array_equal(report.confusion, [[0, 1], [0, 1]])
    assert report.per_tx_accuracy == [0.0, 1.0]


def test_rate_shortfall():
    item = labeled(EXAMPLE_RATES, (0, 0, 1), limit=2)
    record = evaluate(fixed_model((0, 1, 1), 2), [item]).records[0]
    assert record.achieved_rate == 10.0
    assert record.optimal_rate == 12.0
    assert record.rate_error == 2.0
    assert record.violated == 0


def test_infeasible_gain_is_flagged():
    item = labeled([[5.0, 1.0], [4.0, 2.0], [3.0, 0.0]], (0, 0, 1), limit=2)
    report = evaluate(fixed_model((0, 0, 0), 2), [item])
    record = report.records[0]
    assert record.achieved_rate == 12.0
    assert record.rate_error == -3.0
    assert record.violated == 1
    assert record.max_load == 3
    assert report.summary["violation_rate"] == 1.0
    assert report.summary["mean_rate_error_feasible"] is None


def test_evaluation_identities():
    items = random_labeled(25, limit=2)
    spec = default_spec("topdown", 4, 3, {"hidden_sizes": (12,), "time_steps": 6, "threshold": 0.3})
    model = TopDownModel(spec=spec, weights=init_weights(spec, 4),
                         standardizer=Standardizer(5e6, 3e6), n_rx=4, n_tx=3, limit=2)
    report = evaluate(model, items)

    assert report.confusion.sum() == 4 * len(items)
    assert report.summary["mean_per_rx_accuracy"] == pytest.approx(
        np.mean([r.per_rx_accuracy for r in report.records]), rel=1e-12)
    for r in report.records:
        assert 0.0 <= r.per_rx_accuracy <= 1.0
        if not r.violated:
            assert r.rate_error >= 0.0
    q = report.summary["rate_error_quantiles"]
    assert q["min"] <= q["p25"] <= q["median"] <= q["p75"] <= q["p90"] <= q["max"]
    assert report.summary["instances"] == 25
    assert report.summary["rx_predictions"] == 100


def test_no_violations_when_limit_covers_all_receivers():
    items = random_labeled(10, n=3, m=2, limit=3)
    report = evaluate(fixed_model((1, 1, 1), 2, limit=3), items)
    assert report.summary["violation_rate"] == 0.0


def test_parallel_evaluation_matches_serial():
    items = random_labeled(8)
    spec = default_spec("topdown", 4, 3, {"hidden_sizes": (8,), "time_steps": 4})
    model = TopDownModel(spec=spec, weights=init_weights(spec, 1),
                         standardizer=Standardizer(5e6, 3e6), n_rx=4, n_tx=3, limit=2)
    assert evaluate(model, items, jobs=2).to_dict() == evaluate(model, items, jobs=1).to_dict()


def test_unlabeled_data_rejected():
    inst = Instance(step=0, rates=np.ones((2, 2)), positions=np.zeros((2, 3)))
    with pytest.raises(DataFormatError):
        evaluate(fixed_model((0, 0), 2), [inst])


def test_shape_mismatch_rejected():
    with pytest.raises(ShapeMismatchError):
        evaluate(fixed_model((0, 0), 2), [labeled(EXAMPLE_RATES, (0, 0, 1), limit=2)])


# --- report files ----------------------------------------------------------------

def test_report_files(tmp_path):
    items = [labeled(EXAMPLE_RATES, (0, 0, 1), limit=2, step=k) for k in range(3)]
    report = evaluate(fixed_model((0, 1, 1), 2), items)
    json_path, csv_path = tmp_path / "r" / "report.json", tmp_path / "r" / "report.csv"
    write_report(report, str(json_path), str(csv_path))

    with open(csv_path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 1 + len(items)
    assert rows[1] == ["0", "0.666667", "0", "10", "12", "2", "0"]

    data = json.loads(json_path.read_text())
    assert data["confusion"] == report.confusion.tolist()
    assert data["summary"]["instances"] == 3


def test_empty_report_is_header_only(tmp_path):
    report = evaluate(fixed_model((0, 0), 2), [])
    csv_path = tmp_path / "empty.csv"
    write_report(report, str(tmp_path / "empty.json"), str(csv_path))
    assert csv_path.read_text() == ",".join(CSV_HEADER) + "\n"
    assert report.summary["mean_per_rx_accuracy"] is None
    assert json.loads((tmp_path / "empty.json").read_text())["confusion"] == [[0, 0], [0, 0]]


# --- desk-scale run --------------------------------------------------------------

@pytest.mark.slow
def test_default_scenario_accuracy_and_violations():
    """
    Both estimators on the default 2 BS + 1 RIS scenario, scored on trajectories
    from another seed; at least one seed must meet every target.
    """
    outcomes = []
    for seed in range(3):
        items = label_dataset(generate_dataset(load_scenario_config(str(DEFAULT_SCENARIO), seed=seed)), limit=3)
        held_out = label_dataset(
            generate_dataset(load_scenario_config(str(DEFAULT_SCENARIO), seed=seed + 1000)), limit=3)
        train_cfg = train_config_from_dict({"seed": seed, "loss": {"penalty_weight": 0.1}})
        top, _ = train("topdown", items, train_cfg)
        bottom, _ = train("bottomup", items, train_cfg)
        top_summary = evaluate(top.model, held_out).summary
        bottom_summary = evaluate(bottom.model, held_out).summary
        outcomes.append(
            bottom_summary["mean_per_rx_accuracy"] >= 0.85
            and top_summary["mean_per_rx_accuracy"] >= 0.75
            and top_summary["violation_rate"] <= bottom_summary["violation_rate"]
        )
    assert any(outcomes)
