"""
Data models for generated scenarios.

A RateMatrix is a plain ``numpy.ndarray`` of shape (N, M) in bits/s: one row
per receiver, one column per transmitter.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from src.errors import DataFormatError, ShapeMismatchError

RateMatrix = np.ndarray


def as_rate_matrix(data, nonnegative: bool = True) -> RateMatrix:
    """
    Convert nested lists or an array into a validated float64 rate matrix.

    Args:
        data: Anything ``np.asarray`` accepts
        nonnegative: Also require every entry to be >= 0

    Returns:
        2-D float64 array

    Raises:
        ShapeMismatchError: If the data is not a non-empty 2-D matrix
        DataFormatError: If entries are non-finite (or negative when required)
    """
    try:
        rates = np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise DataFormatError(f"rate matrix is not numeric: {e}") from e
    if rates.ndim != 2 or rates.shape[0] < 1 or rates.shape[1] < 1:
        raise ShapeMismatchError(f"rate matrix must be a non-empty N x M matrix, got shape {rates.shape}")
    if not np.all(np.isfinite(rates)):
        raise DataFormatError("rate matrix contains non-finite entries")
    if nonnegative and np.any(rates < 0):
        raise DataFormatError("rate matrix contains negative entries")
    return rates


@dataclass
class Instance:
    """One time step of a scenario."""
    step: int
    rates: RateMatrix
    positions: np.ndarray  # (N, 3) receiver coordinates in meters


@dataclass
class Dataset:
    """
    Ordered sequence of scenario instances.

    ``config_digest`` is None when the dataset was read back from a file,
    since the JSONL format stores instances only.
    """
    instances: List[Instance] = field(default_factory=list)
    config_digest: Optional[str] = None

    def __len__(self) -> int:
        return len(self.instances)

    @property
    def shape(self) -> Optional[tuple]:
        return self.instances[0].rates.shape if self.instances else None

    def validate(self) -> None:
        """
        Check step ordering and shape consistency.

        Raises:
            DataFormatError: If steps are out of order or have gaps
            ShapeMismatchError: If rate matrix shapes differ between instances
        """
        if not self.instances:
            return
        first = self.instances[0].step
        shape = self.shape
        for k, inst in enumerate(self.instances):
            if inst.step != first + k:
                raise DataFormatError(
                    f"instance {k} has step {inst.step}, expected {first + k} (steps must be ordered without gaps)"
                )
            if inst.rates.shape != shape:
                raise ShapeMismatchError(f"step {inst.step}: rate matrix shape {inst.rates.shape} != {shape}")
            if inst.positions.shape != (shape[0], 3):
                raise ShapeMismatchError(f"step {inst.step}: positions shape {inst.positions.shape} != {(shape[0], 3)}")
