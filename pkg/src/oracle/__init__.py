"""
Ground-truth association oracle (exhaustive constrained search) and labeling.
"""
from .solver import (
    Association,
    default_limit,
    is_feasible,
    solve_optimal,
    solve_unconstrained,
    total_rate,
    tx_loads,
)
from .labeling import LabeledInstance, label_dataset, read_labeled, write_labeled

__all__ = [
    "Association",
    "default_limit",
    "is_feasible",
    "solve_optimal",
    "solve_unconstrained",
    "total_rate",
    "tx_loads",
    "LabeledInstance",
    "label_dataset",
    "read_labeled",
    "write_labeled",
]
