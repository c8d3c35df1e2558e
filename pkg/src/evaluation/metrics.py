"""
Model evaluation against oracle labels.

Per instance: per-RX accuracy, exact match, achieved vs optimal total rate,
rate error (optimal - achieved, positive = shortfall) and capacity violation.
Across instances: an M x M confusion matrix (rows = true TX, columns =
predicted TX) and summary statistics.
"""
import logging
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.errors import DataFormatError, ShapeMismatchError
from src.models import Model, infer
from src.oracle import LabeledInstance, is_feasible, total_rate, tx_loads
from src.utils import parallel_map

logger = logging.getLogger(__name__)

QUANTILES = {"min": 0.0, "p25": 0.25, "median": 0.5, "p75": 0.75, "p90": 0.9, "max": 1.0}


@dataclass(frozen=True)
class StepRecord:
    step: int
    per_rx_accuracy: float
    instance_exact: int
    achieved_rate: float
    optimal_rate: float
    rate_error: float
    violated: int
    predicted: List[int]
    max_load: int
    hidden_spikes: float


@dataclass
class EvalReport:
    """
    Attributes:
        records: One StepRecord per evaluated instance, in input order
        confusion: M x M counts, rows = true TX, columns = predicted TX
        per_tx_accuracy: Recall per true TX (None for a TX that is never optimal)
        summary: Aggregate statistics (None where undefined, e.g. no instances)
    """
    kind: str
    limit: Optional[int]
    records: List[StepRecord] = field(default_factory=list)
    confusion: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.int64))
    per_tx_accuracy: List[Optional[float]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "limit": self.limit,
            "summary": self.summary,
            "per_tx_accuracy": self.per_tx_accuracy,
            "confusion": self.confusion.tolist(),
            "records": [asdict(r) for r in self.records],
        }


def confusion_matrix(true_labels: Sequence[int], pred_labels: Sequence[int], m: int) -> np.ndarray:
    """
    Count (true, predicted) pairs.

    Returns:
        (m, m) int64 matrix with counts[t][p] = |{k : true[k] = t and pred[k] = p}|

    Raises:
        ShapeMismatchError: On length mismatch or labels outside [0, m)
    """
    if len(true_labels) != len(pred_labels):
        raise ShapeMismatchError(f"{len(true_labels)} true labels but {len(pred_labels)} predictions")
    counts = np.zeros((m, m), dtype=np.int64)
    if len(true_labels) == 0:
        return counts
    t = np.asarray(true_labels, dtype=np.int64)
    p = np.asarray(pred_labels, dtype=np.int64)
    if np.any((t < 0) | (t >= m) | (p < 0) | (p >= m)):
        raise ShapeMismatchError(f"labels must lie in [0, {m})")
    np.add.at(counts, (t, p), 1)
    return counts


def _evaluate_one(item: LabeledInstance, model: Model) -> StepRecord:
    pred, spikes = infer(model, item.rates)
    n, m = item.rates.shape
    correct = sum(1 for a, b in zip(pred, item.optimal) if a == b)
    achieved = total_rate(item.rates, pred)
    return StepRecord(
        step=item.step,
        per_rx_accuracy=correct / n,
        instance_exact=int(correct == n),
        achieved_rate=achieved,
        optimal_rate=item.optimal_total,
        rate_error=item.optimal_total - achieved,
        violated=int(not is_feasible(pred, m, item.limit)),
        predicted=list(pred),
        max_load=max(tx_loads(pred, m)),
        hidden_spikes=spikes,
    )


def _summarize(records: Sequence[StepRecord], confusion: np.ndarray, n_rx: int) -> Dict[str, Any]:
    if not records:
        return {
            "instances": 0,
            "rx_predictions": 0,
            "mean_per_rx_accuracy": None,
            "mean_instance_accuracy": None,
            "mean_rate_error": None,
            "mean_rate_error_feasible": None,
            "mean_relative_rate_error": None,
            "rate_error_quantiles": None,
            "violation_rate": None,
            "max_load": None,
            "mean_hidden_spikes": None,
        }
    errors = np.array([r.rate_error for r in records])
    feasible = [r.rate_error for r in records if not r.violated]
    relative = [r.rate_error / r.optimal_rate for r in records if r.optimal_rate > 0]
    return {
        "instances": len(records),
        "rx_predictions": len(records) * n_rx,
        "mean_per_rx_accuracy": float(np.trace(confusion) / confusion.sum()),
        "mean_instance_accuracy": float(np.mean([r.instance_exact for r in records])),
        "mean_rate_error": float(errors.mean()),
        "mean_rate_error_feasible": float(np.mean(feasible)) if feasible else None,
        "mean_relative_rate_error": float(np.mean(relative)) if relative else None,
        "rate_error_quantiles": {name: float(np.quantile(errors, q)) for name, q in QUANTILES.items()},
        "violation_rate": float(np.mean([r.violated for r in records])),
        "max_load": int(max(r.max_load for r in records)),
        "mean_hidden_spikes": float(np.mean([r.hidden_spikes for r in records])),
    }


def evaluate(model: Model, labeled: Sequence[LabeledInstance], jobs: int = 1) -> EvalReport:
    """
    Compare model predictions with oracle labels.

    Args:
        model: Trained top-down or bottom-up model
        labeled: Labeled instances
        jobs: Worker processes for per-instance prediction

    Returns:
        EvalReport; aggregation runs in input order, so results do not depend on ``jobs``

    Raises:
        DataFormatError: If an instance carries no label
        ShapeMismatchError: If instance shapes do not fit the model
    """
    for item in labeled:
        if getattr(item, "optimal", None) is None:
            raise DataFormatError(f"step {getattr(item, 'step', '?')}: instance is not labeled")

    m = model.n_tx
    limits = sorted({item.limit for item in labeled})
    records = parallel_map(partial(_evaluate_one, model=model), labeled, jobs=jobs)

    confusion = np.zeros((m, m), dtype=np.int64)
    for item, record in zip(labeled, records):
        confusion += confusion_matrix(item.optimal, record.predicted, m)

    row_totals = confusion.sum(axis=1)
    per_tx = [float(confusion[j, j] / row_totals[j]) if row_totals[j] else None for j in range(m)]
    n_rx = labeled[0].rates.shape[0] if labeled else 0
    report = EvalReport(
        kind=model.kind.value,
        limit=limits[0] if len(limits) == 1 else None,
        records=list(records),
        confusion=confusion,
        per_tx_accuracy=per_tx,
        summary=_summarize(records, confusion, n_rx),
    )
    if records:
        s = report.summary
        logger.info(
            f"Evaluated {s['instances']} instances: per-RX accuracy {s['mean_per_rx_accuracy']:.4f}, "
            f"exact {s['mean_instance_accuracy']:.4f}, mean rate error {s['mean_rate_error']:.6g}, "
            f"violation rate {s['violation_rate']:.4f}"
        )
    else:
        logger.warning("No instances to evaluate")
    return report
