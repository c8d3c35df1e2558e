"""
Mini-batch training loop: seeded split, Adam, plateau schedule, early
stopping and best-epoch checkpoint selection.

All randomness is derived from the config seed with SeedSequence keys
(split, per-epoch shuffle, per-batch dropout), so a run is a pure function
of (data, config).
"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.errors import ShapeMismatchError, TrainingError
from src.models import (
    BottomUpModel,
    LossConfig,
    Model,
    ModelKind,
    Standardizer,
    TopDownModel,
    bottomup_batch_loss,
    default_spec,
    encode_inputs,
    fit_standardizer,
    topdown_loss,
)
from src.oracle import LabeledInstance
from src.snn import AdamState, Mode, NetworkSpec, Weights, adam_step, backward, forward, init_weights
from src.training.checkpoint import Checkpoint, CheckpointMeta
from src.training.config import PlateauConfig, TrainConfig
from src.utils import ensure_directory

logger = logging.getLogger(__name__)

SPLIT_STREAM = 0x53504C54
SHUFFLE_STREAM = 0x53484646
DROPOUT_STREAM = 0x44524F50

MIN_IMPROVEMENT = 1e-8

HISTORY_HEADER = ["epoch", "train_loss", "val_loss", "val_accuracy", "lr"]


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    val_accuracy: float
    lr: float


@dataclass
class TrainHistory:
    records: List[EpochRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def val_losses(self) -> List[float]:
        return [r.val_loss for r in self.records]


def _rng(seed: int, stream: int, *indices: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, stream, *indices]))


def split_dataset(data: Sequence[LabeledInstance], ratio: float,
                  seed: int) -> Tuple[List[LabeledInstance], List[LabeledInstance]]:
    """
    Seeded shuffle, then split at floor(ratio * len).

    Raises:
        TrainingError: With fewer than 2 instances or when either side would be empty
    """
    if len(data) < 2:
        raise TrainingError(f"need at least 2 labeled instances to split, got {len(data)}")
    order = _rng(seed, SPLIT_STREAM).permutation(len(data))
    cut = math.floor(ratio * len(data))
    if cut == 0 or cut == len(data):
        raise TrainingError(f"split ratio {ratio} leaves an empty split for {len(data)} instances")
    train = [data[i] for i in order[:cut]]
    val = [data[i] for i in order[cut:]]
    return train, val


def epochs_since_improvement(val_losses: Sequence[float]) -> int:
    """
    Trailing epochs that failed to beat the best earlier val loss by MIN_IMPROVEMENT.

    The first epoch is the baseline and counts as an improvement.
    """
    best = math.inf
    last = 0
    for k, loss in enumerate(val_losses):
        if loss < best - MIN_IMPROVEMENT:
            best = loss
            last = k
    return len(val_losses) - 1 - last


def reduce_lr_on_plateau(history: TrainHistory, plateau: PlateauConfig, lr: float) -> float:
    """
    Next learning rate.

    The rate is multiplied by ``factor`` (floored at ``min_lr``) once ``patience``
    epochs have passed without improvement and without an earlier reduction
    (epochs are counted at the current rate only).

    Raises:
        TrainingError: If ``history`` is empty
    """
    if not history.records:
        raise TrainingError("plateau check needs at least one epoch")
    stale = epochs_since_improvement(history.val_losses)
    at_current_rate = 0
    for record in reversed(history.records):
        if record.lr != lr:
            break
        at_current_rate += 1
    if min(stale, at_current_rate) >= plateau.patience:
        new_lr = max(lr * plateau.factor, plateau.min_lr)
        if new_lr < lr:
            logger.info(f"Validation loss flat for {stale} epochs, lr {lr:.3g} -> {new_lr:.3g}")
        return new_lr
    return lr


def _check_shapes(data: Sequence[LabeledInstance]) -> Tuple[int, int]:
    shapes = {item.rates.shape for item in data}
    if len(shapes) != 1:
        raise ShapeMismatchError(f"labeled instances have mixed shapes {sorted(shapes)}")
    for item in data:
        if len(item.optimal) != item.rates.shape[0]:
            raise ShapeMismatchError(f"step {item.step}: label length does not match {item.rates.shape[0]} RX")
    n_rx, n_tx = shapes.pop()
    return n_rx, n_tx


def build_samples(kind: ModelKind, items: Sequence[LabeledInstance],
                  s: Standardizer) -> Tuple[np.ndarray, np.ndarray]:
    """
    Stack network inputs and targets.

    Top-down: one (N*M) input and one length-N target per instance.
    Bottom-up: one M input and one TX index per (instance, RX row).
    """
    xs = [encode_inputs(kind, s, item.rates) for item in items]
    if kind == ModelKind.TOPDOWN:
        return np.concatenate(xs, axis=0), np.array([item.optimal for item in items], dtype=np.int64)
    targets = np.concatenate([np.asarray(item.optimal, dtype=np.int64) for item in items])
    return np.concatenate(xs, axis=0), targets


def batch_loss(kind: ModelKind, logits: np.ndarray, targets: np.ndarray, loss_cfg: LossConfig,
               n_rx: int, n_tx: int) -> Tuple[float, np.ndarray]:
    """
    Mean loss over a batch and its gradient w.r.t. the batch logits.
    """
    if kind == ModelKind.BOTTOMUP:
        return bottomup_batch_loss(logits, targets)
    batch = logits.shape[0]
    total = 0.0
    grad = np.empty_like(logits)
    for k in range(batch):
        loss, g = topdown_loss(logits[k].reshape(n_rx, n_tx), targets[k], loss_cfg)
        total += loss
        grad[k] = g.ravel() / batch
    return total / batch, grad


def _accuracy(kind: ModelKind, logits: np.ndarray, targets: np.ndarray, n_rx: int, n_tx: int) -> float:
    if kind == ModelKind.TOPDOWN:
        picks = np.argmax(logits.reshape(-1, n_rx, n_tx), axis=2)
    else:
        picks = np.argmax(logits, axis=1)
    return float(np.mean(picks == targets))


def train_step(kind: ModelKind, spec: NetworkSpec, w: Weights, st: AdamState, x: np.ndarray,
               targets: np.ndarray, loss_cfg: LossConfig, lr: float, n_rx: int, n_tx: int,
               rng: Optional[np.random.Generator]) -> Tuple[float, Weights, AdamState]:
    """
    Train-mode forward, loss, BPTT and one Adam update on one batch.

    Returns:
        Tuple of (batch loss before the update, new weights, new optimizer state)
    """
    logits, trace = forward(spec, w, x, Mode.TRAIN, rng)
    loss, dlogits = batch_loss(kind, logits, targets, loss_cfg, n_rx, n_tx)
    grads = backward(spec, w, trace, dlogits)
    w, st = adam_step(w, grads, st, lr)
    return loss, w, st


def evaluate_split(kind: ModelKind, spec: NetworkSpec, w: Weights, x: np.ndarray, targets: np.ndarray,
                   loss_cfg: LossConfig, n_rx: int, n_tx: int) -> Tuple[float, float]:
    """Eval-mode (dropout off) loss and per-RX accuracy."""
    logits, _ = forward(spec, w, x, Mode.EVAL)
    loss, _ = batch_loss(kind, logits, targets, loss_cfg, n_rx, n_tx)
    return loss, _accuracy(kind, logits, targets, n_rx, n_tx)


def train(kind: Union[ModelKind, str], data: Sequence[LabeledInstance],
          cfg: TrainConfig) -> Tuple[Checkpoint, TrainHistory]:
    """
    Train a top-down or bottom-up model on oracle-labeled data.

    Args:
        kind: "topdown" or "bottomup"
        data: Labeled instances with one common shape
        cfg: Training configuration

    Returns:
        Tuple of (checkpoint of the epoch with the lowest val loss, per-epoch history)

    Raises:
        TrainingError: If there is nothing to train on or epochs_max is 0
        ShapeMismatchError: If instances disagree in shape
    """
    kind = ModelKind(kind)
    if not data:
        raise TrainingError("no labeled instances to train on")
    n_rx, n_tx = _check_shapes(data)
    if cfg.epochs_max == 0:
        raise TrainingError("no training performed: epochs_max is 0")

    label_limits = {item.limit for item in data}
    if len(label_limits) > 1:
        logger.warning(f"Labels use several capacity limits {sorted(label_limits)}, using {data[0].limit}")
    loss_cfg = cfg.loss.resolve(data[0].limit)

    train_set, val_set = split_dataset(data, cfg.split_ratio, cfg.seed)
    standardizer = fit_standardizer([item.rates for item in train_set])
    spec = default_spec(kind, n_rx, n_tx, cfg.network.model_dump())
    x_train, y_train = build_samples(kind, train_set, standardizer)
    x_val, y_val = build_samples(kind, val_set, standardizer)
    logger.info(
        f"Training {kind.value} model {list(spec.layer_sizes)} on {len(train_set)} instances "
        f"({len(x_train)} samples), validating on {len(val_set)}, L={loss_cfg.limit}"
    )

    w = init_weights(spec, cfg.seed)
    st = AdamState.for_weights(w)
    lr = cfg.lr0
    history = TrainHistory()
    best_w, best_epoch, best_loss = w.copy(), 0, math.inf

    for epoch in range(1, cfg.epochs_max + 1):
        order = _rng(cfg.seed, SHUFFLE_STREAM, epoch).permutation(len(x_train))
        weighted_loss = 0.0
        for b, start in enumerate(range(0, len(order), cfg.batch_size)):
            idx = order[start:start + cfg.batch_size]
            loss, w, st = train_step(kind, spec, w, st, x_train[idx], y_train[idx], loss_cfg, lr,
                                     n_rx, n_tx, _rng(cfg.seed, DROPOUT_STREAM, epoch, b))
            weighted_loss += loss * len(idx)
            logger.debug(f"epoch {epoch} batch {b}: loss={loss:.6g}")

        val_loss, val_acc = evaluate_split(kind, spec, w, x_val, y_val, loss_cfg, n_rx, n_tx)
        history.records.append(EpochRecord(
            epoch=epoch,
            train_loss=weighted_loss / len(order),
            val_loss=val_loss,
            val_accuracy=val_acc,
            lr=lr,
        ))
        logger.info(
            f"Epoch {epoch}: train_loss={weighted_loss / len(order):.4f} "
            f"val_loss={val_loss:.4f} val_acc={val_acc:.4f} lr={lr:.3g}"
        )

        if val_loss < best_loss:
            best_w, best_epoch, best_loss = w.copy(), epoch, val_loss

        if epochs_since_improvement(history.val_losses) >= cfg.early_stop_patience:
            logger.warning(f"Early stop at epoch {epoch}: no val improvement since epoch {best_epoch}")
            break
        lr = reduce_lr_on_plateau(history, cfg.plateau, lr)

    if kind == ModelKind.TOPDOWN:
        model: Model = TopDownModel(spec=spec, weights=best_w, standardizer=standardizer,
                                    n_rx=n_rx, n_tx=n_tx, limit=loss_cfg.limit)
    else:
        model = BottomUpModel(spec=spec, weights=best_w, standardizer=standardizer, n_tx=n_tx)
    meta = CheckpointMeta(best_epoch=best_epoch, best_val_loss=best_loss, config_digest=cfg.digest())
    logger.info(f"Best epoch {best_epoch} with val_loss={best_loss:.6g}")
    return Checkpoint(model=model, n_rx=n_rx, n_tx=n_tx, limit=loss_cfg.limit, meta=meta), history


def write_history(history: TrainHistory, path: str) -> None:
    """CSV with one row per epoch; floats with 6 significant digits."""
    out = Path(path)
    ensure_directory(str(out.parent))
    df = pd.DataFrame(
        [{column: getattr(r, column) for column in HISTORY_HEADER} for r in history.records],
        columns=HISTORY_HEADER,
    )
    df.to_csv(out, index=False, float_format="%.6g", lineterminator="\n", encoding="utf-8")
    logger.info(f"Wrote {len(history)} epochs of training history to {out}")
