"""
Global standardization of rate matrices.

One (mu, sigma) pair is pooled over every entry of every training matrix, so
standardization is a single increasing affine map: row-wise and matrix-wide
orderings of rates are preserved.
"""
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.errors import TrainingError

logger = logging.getLogger(__name__)

SIGMA_FLOOR = 1e-9


@dataclass(frozen=True)
class Standardizer:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")


def fit_standardizer(train: Sequence[np.ndarray]) -> Standardizer:
    """
    Pooled mean and population standard deviation of all training entries.

    Args:
        train: Training rate matrices

    Returns:
        Standardizer with sigma floored at 1e-9

    Raises:
        TrainingError: If ``train`` is empty
    """
    if len(train) == 0:
        raise TrainingError("cannot fit a standardizer on an empty training set")
    pooled = np.concatenate([np.asarray(r, dtype=np.float64).ravel() for r in train])
    mu = float(np.mean(pooled))
    std = float(np.std(pooled))
    if std < SIGMA_FLOOR:
        logger.warning(f"Rate spread {std:.3g} below floor, using sigma={SIGMA_FLOOR}")
    return Standardizer(mu=mu, sigma=max(std, SIGMA_FLOOR))


def standardize(s: Standardizer, rates: np.ndarray) -> np.ndarray:
    """Elementwise (x - mu) / sigma."""
    return (np.asarray(rates, dtype=np.float64) - s.mu) / s.sigma
