"""
Exhaustive-search oracle for capacity-constrained user association.

Maximises the total rate sum_i rates[i][a[i]] subject to every TX serving at
most L receivers. All M**N assignments are enumerated in lexicographic order
and only a strictly better total replaces the incumbent, so ties resolve to the
lexicographically smallest assignment.
"""
import itertools
import logging
import math
from collections import Counter
from typing import Sequence, Tuple

import numpy as np

from src.errors import ConfigError, InfeasibleInstanceError, ShapeMismatchError

logger = logging.getLogger(__name__)

Association = Tuple[int, ...]


def default_limit(n_rx: int, n_tx: int) -> int:
    """Capacity used when none is given: ceil(N / M) + 1."""
    return math.ceil(n_rx / n_tx) + 1


def _as_matrix(rates) -> np.ndarray:
    matrix = np.asarray(rates, dtype=np.float64)
    if matrix.ndim != 2:
        raise ShapeMismatchError(f"rates must be an N x M matrix, got shape {matrix.shape}")
    return matrix


def total_rate(rates, a: Sequence[int]) -> float:
    """
    Sum of the rates selected by an association.

    Uses math.fsum, so the result does not depend on summation order.

    Args:
        rates: (N, M) rate matrix
        a: Length-N vector of TX indices

    Returns:
        Total rate in bits/s

    Raises:
        ShapeMismatchError: If ``a`` does not fit the matrix
    """
    matrix = _as_matrix(rates)
    n, m = matrix.shape
    if len(a) != n:
        raise ShapeMismatchError(f"association has {len(a)} entries, rate matrix has {n} rows")
    if any(not 0 <= j < m for j in a):
        raise ShapeMismatchError(f"association {list(a)} has TX indices outside [0, {m})")
    return math.fsum(float(matrix[i, j]) for i, j in enumerate(a))


def tx_loads(a: Sequence[int], m: int) -> list:
    """Number of receivers assigned to each of the ``m`` transmitters."""
    counts = Counter(a)
    return [counts.get(j, 0) for j in range(m)]


def is_feasible(a: Sequence[int], m: int, limit: int) -> bool:
    """True iff no TX serves more than ``limit`` receivers."""
    return all(count <= limit for count in Counter(a).values())


def solve_optimal(rates, limit: int) -> Tuple[Association, float]:
    """
    Constrained-optimal association by exhaustive enumeration.

    Args:
        rates: (N, M) rate matrix (any finite reals)
        limit: Capacity L per TX

    Returns:
        Tuple of (association, total rate)

    Raises:
        InfeasibleInstanceError: If N > M * L
        ConfigError: If ``limit`` is negative
    """
    matrix = _as_matrix(rates)
    n, m = matrix.shape
    if limit < 0:
        raise ConfigError(f"capacity limit must be >= 0, got {limit}")
    if n > m * limit:
        raise InfeasibleInstanceError(f"infeasible instance: N={n} exceeds M*L={m}*{limit}")

    rows = matrix.tolist()
    best: Association = ()
    best_total = -math.inf
    for candidate in itertools.product(range(m), repeat=n):
        if not is_feasible(candidate, m, limit):
            continue
        total = math.fsum(rows[i][j] for i, j in enumerate(candidate))
        if total > best_total:
            best, best_total = candidate, total
    return best, best_total


def solve_unconstrained(rates) -> Tuple[Association, float]:
    """Row-wise argmax (lowest TX index on ties) and its total rate."""
    matrix = _as_matrix(rates)
    assoc = tuple(int(j) for j in np.argmax(matrix, axis=1))
    return assoc, total_rate(matrix, assoc)
