"""
Tests for splitting, the plateau schedule, the training loop and checkpoints.
"""
import json

import numpy as np
import pytest

from src.errors import ConfigError, DataFormatError, ShapeMismatchError, TrainingError
from src.models import LossConfig, ModelKind, default_spec, fit_standardizer, predict
from src.oracle import LabeledInstance, total_rate
from src.snn import AdamState, Mode, forward, init_weights
from src.training import (
    EpochRecord,
    PlateauConfig,
    TrainHistory,
    load_checkpoint,
    load_train_config,
    reduce_lr_on_plateau,
    save_checkpoint,
    split_dataset,
    train,
    train_config_from_dict,
    write_history,
)
from src.training.trainer import batch_loss, build_samples, train_step

FAST_NET = {"hidden_sizes": [16], "time_steps": 5}


def toy_data(count, n=4, m=3, seed=0):
    """Labels are row argmaxes: with L = N the capacity never binds."""
    rng = np.random.default_rng(seed)
    items = []
    for step in range(count):
        rates = rng.uniform(0.0, 1.0, size=(n, m))
        optimal = tuple(int(j) for j in np.argmax(rates, axis=1))
        items.append(LabeledInstance(step=step, rates=rates, optimal=optimal,
                                     optimal_total=total_rate(rates, optimal), limit=n))
    return items


def fast_config(**overrides):
    data = {"epochs_max": 3, "batch_size": 16, "seed": 11, "network": FAST_NET}
    data.update(overrides)
    return train_config_from_dict(data)


def history_of(losses, lr=1e-3):
    return TrainHistory([EpochRecord(epoch=k + 1, train_loss=l, val_loss=l, val_accuracy=0.0, lr=lr)
                         for k, l in enumerate(losses)])


# --- splitting -----------------------------------------------------------------

def test_split_sizes_and_partition():
    data = toy_data(100)
    train_set, val_set = split_dataset(data, 0.8, seed=3)
    assert (len(train_set), len(val_set)) == (80, 20)
    steps_train = {item.step for item in train_set}
    steps_val = {item.step for item in val_set}
    assert steps_train.isdisjoint(steps_val)
    assert steps_train | steps_val == set(range(100))


def test_split_is_seeded():
    data = toy_data(30)
    a = [item.step for item in split_dataset(data, 0.8, seed=5)[0]]
    b = [item.step for item in split_dataset(data, 0.8, seed=5)[0]]
    c = [item.step for item in split_dataset(data, 0.8, seed=6)[0]]
    assert a == b
    assert a != c


def test_split_rejects_tiny_inputs():
    with pytest.raises(TrainingError):
        split_dataset(toy_data(1), 0.8, seed=0)
    with pytest.raises(TrainingError):
        split_dataset(toy_data(10), 0.05, seed=0)


# --- plateau schedule ----------------------------------------------------------

PLATEAU = PlateauConfig(factor=0.5, patience=10, min_lr=1e-5)


def test_improving_history_keeps_lr():
    assert reduce_lr_on_plateau(history_of([1.0 - 0.01 * k for k in range(30)]), PLATEAU, 1e-3) == 1e-3


def test_ten_flat_epochs_halve_lr():
    assert reduce_lr_on_plateau(history_of([0.5] * 11), PLATEAU, 1e-3) == 5e-4
    assert reduce_lr_on_plateau(history_of([0.5] * 10), PLATEAU, 1e-3) == 1e-3


def test_tiny_gains_do_not_count_as_improvement():
    losses = [0.5 - 5e-10 * k for k in range(11)]
    assert reduce_lr_on_plateau(history_of(losses), PLATEAU, 1e-3) == 5e-4


def test_lr_floor():
    assert reduce_lr_on_plateau(history_of([0.5] * 20, lr=1e-5), PLATEAU, 1e-5) == 1e-5
    assert reduce_lr_on_plateau(history_of([0.5] * 20, lr=1.5e-5), PLATEAU, 1.5e-5) == 1e-5


def test_patience_restarts_after_reduction():
    history = history_of([0.5] * 11)
    history.records.extend(
        EpochRecord(epoch=12 + k, train_loss=0.5, val_loss=0.5, val_accuracy=0.0, lr=5e-4) for k in range(5)
    )
    assert reduce_lr_on_plateau(history, PLATEAU, 5e-4) == 5e-4


def test_plateau_needs_history():
    with pytest.raises(TrainingError):
        reduce_lr_on_plateau(TrainHistory(), PLATEAU, 1e-3)


# --- training loop -------------------------------------------------------------

def test_training_is_deterministic(tmp_path):
    data = toy_data(40)
    first, hist_a = train("bottomup", data, fast_config())
    second, hist_b = train("bottomup", data, fast_config())
    save_checkpoint(first, str(tmp_path / "a.json"))
    save_checkpoint(second, str(tmp_path / "b.json"))
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert hist_a.records == hist_b.records


@pytest.mark.parametrize("kind", ["topdown", "bottomup"])
def test_best_checkpoint_and_lr_sequence(kind):
    cfg = fast_config(epochs_max=6, plateau={"factor": 0.5, "patience": 1, "min_lr": 2e-4})
    ckpt, history = train(kind, toy_data(40), cfg)
    assert ckpt.kind == ModelKind(kind)
    assert 1 <= len(history) <= 6
    assert ckpt.meta.best_val_loss == min(history.val_losses)
    assert history.records[ckpt.meta.best_epoch - 1].val_loss == ckpt.meta.best_val_loss
    lrs = [r.lr for r in history.records]
    assert all(b <= a for a, b in zip(lrs, lrs[1:]))
    assert min(lrs) >= 2e-4
    assert ckpt.meta.config_digest == cfg.digest()


def test_zero_epochs_is_an_error():
    with pytest.raises(TrainingError, match="no training performed"):
        train("bottomup", toy_data(10), fast_config(epochs_max=0))


def test_training_input_validation():
    with pytest.raises(TrainingError):
        train("topdown", [], fast_config())
    mixed = toy_data(5) + toy_data(5, n=3)
    with pytest.raises(ShapeMismatchError):
        train("topdown", mixed, fast_config())


def test_one_adam_step_lowers_first_batch_loss():
    data = toy_data(40)
    s = fit_standardizer([item.rates for item in data])
    kind = ModelKind.BOTTOMUP
    x, y = build_samples(kind, data[:8], s)
    spec = default_spec(kind, 4, 3)
    w = init_weights(spec, 0)
    loss_cfg = LossConfig(penalty_weight=0.0, limit=4)

    before, w_next, _ = train_step(kind, spec, w, AdamState.for_weights(w), x, y, loss_cfg, 1e-3,
                                   4, 3, np.random.default_rng(9))
    logits, _ = forward(spec, w_next, x, Mode.TRAIN, np.random.default_rng(9))
    after, _ = batch_loss(kind, logits, y, loss_cfg, 4, 3)
    assert after < before


def test_history_file(tmp_path):
    _, history = train("bottomup", toy_data(20), fast_config(epochs_max=2))
    path = tmp_path / "hist" / "history.csv"
    write_history(history, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "epoch,train_loss,val_loss,val_accuracy,lr"
    assert len(lines) == len(history) + 1
    assert lines[1].startswith("1,")


def test_history_rows_use_six_significant_digits(tmp_path):
    history = TrainHistory([
        EpochRecord(epoch=1, train_loss=0.123456789, val_loss=2.0, val_accuracy=0.5, lr=1e-3),
        EpochRecord(epoch=2, train_loss=1234567.0, val_loss=1.5, val_accuracy=1.0, lr=5e-4),
    ])
    path = tmp_path / "history.csv"
    write_history(history, str(path))
    assert path.read_text() == (
        "epoch,train_loss,val_loss,val_accuracy,lr\n"
        "1,0.123457,2,0.5,0.001\n"
        "2,1.23457e+06,1.5,1,0.0005\n"
    )


def test_empty_history_is_header_only(tmp_path):
    path = tmp_path / "history.csv"
    write_history(TrainHistory(), str(path))
    assert path.read_text() == "epoch,train_loss,val_loss,val_accuracy,lr\n"


# --- config ----------------------------------------------------------------------

def test_train_config_seed_precedence(tmp_path, monkeypatch):
    path = tmp_path / "train.json"
    path.write_text(json.dumps({"seed": 4, "batch_size": 8}))
    monkeypatch.setenv("SPIKE_ASSOC_SEED", "99")
    assert load_train_config(str(path)).seed == 4
    assert load_train_config(str(path), seed=12).seed == 12
    assert load_train_config(None).seed == 99


@pytest.mark.parametrize("bad", [
    {"split_ratio": 1.0},
    {"batch_size": 0},
    {"plateau": {"factor": 1.5}},
    {"loss": {"penalty_weight": -1}},
    {"network": {"dropout": 1.0}},
    {"unknown": 1},
])
def test_train_config_rejects_invalid(bad):
    with pytest.raises(ConfigError):
        train_config_from_dict(bad)


# --- checkpoints -----------------------------------------------------------------

@pytest.mark.parametrize("kind", ["topdown", "bottomup"])
def test_checkpoint_round_trip_predictions(tmp_path, kind):
    ckpt, _ = train(kind, toy_data(30), fast_config(epochs_max=2))
    path = str(tmp_path / "model.json")
    save_checkpoint(ckpt, path)
    loaded = load_checkpoint(path)

    for a, b in zip(ckpt.model.weights.arrays(), loaded.model.weights.arrays()):
        np.testing.assert_array_equal(a, b)
    assert loaded.model.standardizer == ckpt.model.standardizer
    assert loaded.model.spec == ckpt.model.spec
    assert (loaded.n_rx, loaded.n_tx, loaded.limit) == (4, 3, 4)

    rng = np.random.default_rng(21)
    for _ in range(100):
        rates = rng.uniform(0.0, 1.0, size=(4, 3))
        assert predict(loaded.model, rates) == predict(ckpt.model, rates)


def test_checkpoint_rejects_bad_files(tmp_path):
    ckpt, _ = train("bottomup", toy_data(10), fast_config(epochs_max=1))
    path = tmp_path / "model.json"
    save_checkpoint(ckpt, str(path))
    text = path.read_text()

    truncated = tmp_path / "truncated.json"
    truncated.write_text(text[: len(text) // 2])
    with pytest.raises(DataFormatError):
        load_checkpoint(str(truncated))

    data = json.loads(text)
    data["format_version"] = 99
    future = tmp_path / "future.json"
    future.write_text(json.dumps(data))
    with pytest.raises(DataFormatError, match="format_version"):
        load_checkpoint(str(future))

    data = json.loads(text)
    data["layers"][0]["w"] = data["layers"][0]["w"][:-1]
    short = tmp_path / "short.json"
    short.write_text(json.dumps(data))
    with pytest.raises(DataFormatError):
        load_checkpoint(str(short))

    with pytest.raises(DataFormatError):
        load_checkpoint(str(tmp_path / "missing.json"))


# --- learnability ----------------------------------------------------------------

@pytest.mark.slow
def test_bottomup_learns_row_argmax():
    ckpt, history = train("bottomup", toy_data(400, seed=1), train_config_from_dict({"seed": 0}))
    assert max(r.val_accuracy for r in history.records) >= 0.95
    assert history.records[ckpt.meta.best_epoch - 1].val_loss == ckpt.meta.best_val_loss
