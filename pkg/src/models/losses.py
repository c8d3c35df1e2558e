"""
Training losses with analytic gradients.

Top-down: mean row-wise softmax cross-entropy plus a squared hinge on the soft
per-TX load, lambda * sum_j max(0, sum_i p_ij - L)^2.
Bottom-up: plain softmax cross-entropy on one receiver's logits.
"""
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from src.errors import ConfigError, ShapeMismatchError


@dataclass(frozen=True)
class LossConfig:
    penalty_weight: float = 0.1
    limit: int = 1

    def __post_init__(self):
        if self.penalty_weight < 0:
            raise ConfigError(f"penalty_weight must be >= 0, got {self.penalty_weight}")


def _softmax_rows(logits: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Row-wise softmax probabilities and log-probabilities."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    log_p = shifted - log_norm
    return np.exp(log_p), log_p


def _check_finite(logits: np.ndarray) -> None:
    if not np.all(np.isfinite(logits)):
        raise ValueError("logits contain non-finite values")


def topdown_loss(logits: np.ndarray, target: Sequence[int], cfg: LossConfig) -> Tuple[float, np.ndarray]:
    """
    Cross-entropy plus soft capacity penalty for one N x M logit matrix.

    Args:
        logits: (N, M) output potentials
        target: Optimal association (length N)
        cfg: Penalty weight and capacity L

    Returns:
        Tuple of (loss, dLoss/dlogits with shape (N, M))

    Raises:
        ShapeMismatchError: If target length or indices do not fit
        ValueError: If logits are non-finite
    """
    logits = np.asarray(logits, dtype=np.float64)
    target = np.asarray(target, dtype=np.int64)
    if logits.ndim != 2 or target.shape != (logits.shape[0],):
        raise ShapeMismatchError(f"logits {logits.shape} do not match target of length {target.shape}")
    n, m = logits.shape
    if np.any((target < 0) | (target >= m)):
        raise ShapeMismatchError(f"target indices must lie in [0, {m})")
    _check_finite(logits)

    p, log_p = _softmax_rows(logits)
    rows = np.arange(n)
    ce = -float(np.mean(log_p[rows, target]))
    grad = p.copy()
    grad[rows, target] -= 1.0
    grad /= n

    excess = np.maximum(0.0, p.sum(axis=0) - cfg.limit)
    penalty = float(np.sum(excess * excess))
    if cfg.penalty_weight > 0 and penalty > 0:
        c = 2.0 * excess  # d penalty / d p_ij, same for every row
        grad += cfg.penalty_weight * p * (c - (p * c).sum(axis=1, keepdims=True))

    return ce + cfg.penalty_weight * penalty, grad


def bottomup_loss(logits: np.ndarray, target: int) -> Tuple[float, np.ndarray]:
    """
    Softmax cross-entropy for one receiver.

    Returns:
        Tuple of (loss, p - onehot(target))
    """
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 1 or not 0 <= int(target) < logits.shape[0]:
        raise ShapeMismatchError(f"target {target} does not fit logits of shape {logits.shape}")
    _check_finite(logits)
    p, log_p = _softmax_rows(logits)
    grad = p.copy()
    grad[int(target)] -= 1.0
    return -float(log_p[int(target)]), grad


def bottomup_batch_loss(logits: np.ndarray, targets: Sequence[int]) -> Tuple[float, np.ndarray]:
    """
    Mean bottom-up cross-entropy over a (B, M) batch.

    Returns:
        Tuple of (mean loss, gradient of the mean w.r.t. logits)
    """
    logits = np.asarray(logits, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.int64)
    if logits.ndim != 2 or targets.shape != (logits.shape[0],):
        raise ShapeMismatchError(f"logits {logits.shape} do not match {targets.shape[0]} targets")
    _check_finite(logits)
    p, log_p = _softmax_rows(logits)
    rows = np.arange(logits.shape[0])
    grad = p.copy()
    grad[rows, targets] -= 1.0
    return -float(np.mean(log_p[rows, targets])), grad / logits.shape[0]
