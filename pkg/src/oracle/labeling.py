"""
Dataset labeling with the exhaustive oracle, and labeled JSONL persistence.
"""
import logging
from dataclasses import dataclass
from functools import partial
from typing import Any, Dict, List, Optional

import numpy as np

from src.errors import DataFormatError, InfeasibleInstanceError
from src.oracle.solver import Association, default_limit, solve_optimal, solve_unconstrained
from src.scenario.dataset_io import instance_from_record, instance_to_record, iter_jsonl, write_jsonl
from src.scenario.models import Dataset, Instance, RateMatrix
from src.utils import parallel_map

logger = logging.getLogger(__name__)


@dataclass
class LabeledInstance:
    """
    One training/evaluation record.

    ``optimal`` is feasible for ``limit`` and ``optimal_total`` equals
    total_rate(rates, optimal) exactly.
    """
    step: int
    rates: RateMatrix
    optimal: Association
    optimal_total: float
    limit: int
    unconstrained_total: Optional[float] = None
    positions: Optional[np.ndarray] = None

    @property
    def n_rx(self) -> int:
        return self.rates.shape[0]

    @property
    def n_tx(self) -> int:
        return self.rates.shape[1]


def label_instance(inst: Instance, limit: int) -> LabeledInstance:
    """
    Solve one instance.

    Raises:
        InfeasibleInstanceError: With the instance's step index attached
    """
    try:
        optimal, total = solve_optimal(inst.rates, limit)
    except InfeasibleInstanceError as e:
        raise InfeasibleInstanceError(str(e), step=inst.step) from e
    _, unconstrained = solve_unconstrained(inst.rates)
    return LabeledInstance(
        step=inst.step,
        rates=inst.rates,
        optimal=optimal,
        optimal_total=total,
        limit=limit,
        unconstrained_total=unconstrained,
        positions=inst.positions,
    )


def label_dataset(ds: Dataset, limit: Optional[int] = None, jobs: int = 1) -> List[LabeledInstance]:
    """
    Label every instance of a dataset, preserving order.

    Args:
        ds: Dataset to label
        limit: Capacity L; defaults to ceil(N / M) + 1
        jobs: Worker processes

    Returns:
        One LabeledInstance per dataset instance

    Raises:
        InfeasibleInstanceError: For the first instance with N > M * L
    """
    if not ds.instances:
        return []
    n_rx, n_tx = ds.shape
    if limit is None:
        limit = default_limit(n_rx, n_tx)
        logger.info(f"No capacity limit given, using default L={limit}")
    if n_rx > n_tx * limit:
        raise InfeasibleInstanceError(
            f"infeasible instance: N={n_rx} exceeds M*L={n_tx}*{limit}", step=ds.instances[0].step
        )

    labeled = parallel_map(partial(label_instance, limit=limit), ds.instances, jobs=jobs)
    logger.info(f"Labeled {len(labeled)} instances with L={limit}")
    return labeled


def labeled_to_record(item: LabeledInstance) -> Dict[str, Any]:
    positions = item.positions if item.positions is not None else np.zeros((item.n_rx, 3))
    record = instance_to_record(Instance(step=item.step, rates=item.rates, positions=positions))
    record["optimal"] = [int(j) for j in item.optimal]
    record["optimal_total"] = float(item.optimal_total)
    record["limit"] = int(item.limit)
    if item.unconstrained_total is not None:
        record["unconstrained_total"] = float(item.unconstrained_total)
    return record


def labeled_from_record(record: Dict[str, Any]) -> LabeledInstance:
    """
    Parse a labeled JSONL record.

    Raises:
        DataFormatError: If label fields are missing or inconsistent
    """
    inst = instance_from_record(record)
    try:
        optimal = tuple(int(j) for j in record["optimal"])
        optimal_total = float(record["optimal_total"])
        limit = int(record["limit"])
    except KeyError as e:
        raise DataFormatError(f"step {inst.step}: labeled record missing field {e}") from e
    except (TypeError, ValueError) as e:
        raise DataFormatError(f"step {inst.step}: malformed label: {e}") from e
    n, m = inst.rates.shape
    if len(optimal) != n or any(not 0 <= j < m for j in optimal):
        raise DataFormatError(f"step {inst.step}: optimal association does not fit a {n} x {m} matrix")
    unconstrained = record.get("unconstrained_total")
    return LabeledInstance(
        step=inst.step,
        rates=inst.rates,
        optimal=optimal,
        optimal_total=optimal_total,
        limit=limit,
        unconstrained_total=float(unconstrained) if unconstrained is not None else None,
        positions=inst.positions,
    )


def write_labeled(items: List[LabeledInstance], path: str) -> None:
    count = write_jsonl(path, (labeled_to_record(item) for item in items))
    logger.info(f"Wrote {count} labeled instances to {path}")


def read_labeled(path: str) -> List[LabeledInstance]:
    """
    Load a labeled JSONL file.

    Raises:
        DataFormatError: On malformed or unlabeled content
    """
    items = [labeled_from_record(r) for r in iter_jsonl(path)]
    shapes = {item.rates.shape for item in items}
    if len(shapes) > 1:
        raise DataFormatError(f"{path}: inconsistent rate matrix shapes {sorted(shapes)}")
    logger.info(f"Read {len(items)} labeled instances from {path}")
    return items
