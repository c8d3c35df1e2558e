"""
Top-down (centralized) and bottom-up (per-RX) association estimators.

A top-down model reads the whole standardized N x M rate matrix as one
N*M input vector and emits N*M logits, reshaped row-wise. A bottom-up model
reads one RX row (M values) and emits M logits; it is applied to every row
independently.
"""
import enum
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from src.errors import ConfigError, ShapeMismatchError
from src.models.preprocessing import Standardizer, standardize
from src.oracle.solver import Association
from src.snn import LifParams, Mode, NetworkSpec, Weights, forward, get_snn_config

logger = logging.getLogger(__name__)

DEFAULT_TOPDOWN_HIDDEN = (128, 128)
DEFAULT_BOTTOMUP_HIDDEN = (64, 64)


class ModelKind(str, enum.Enum):
    TOPDOWN = "topdown"
    BOTTOMUP = "bottomup"


@dataclass
class TopDownModel:
    spec: NetworkSpec
    weights: Weights
    standardizer: Standardizer
    n_rx: int
    n_tx: int
    limit: int

    kind = ModelKind.TOPDOWN

    def __post_init__(self):
        expected = self.n_rx * self.n_tx
        if self.spec.input_size != expected or self.spec.output_size != expected:
            raise ShapeMismatchError(
                f"top-down network must map {expected} inputs to {expected} outputs, "
                f"got {self.spec.input_size} -> {self.spec.output_size}"
            )


@dataclass
class BottomUpModel:
    spec: NetworkSpec
    weights: Weights
    standardizer: Standardizer
    n_tx: int

    kind = ModelKind.BOTTOMUP

    def __post_init__(self):
        if self.spec.input_size != self.n_tx or self.spec.output_size != self.n_tx:
            raise ShapeMismatchError(
                f"bottom-up network must map {self.n_tx} inputs to {self.n_tx} outputs, "
                f"got {self.spec.input_size} -> {self.spec.output_size}"
            )


Model = Union[TopDownModel, BottomUpModel]


def default_spec(kind: Union[ModelKind, str], n_rx: int, n_tx: int,
                 overrides: Optional[Dict[str, Any]] = None) -> NetworkSpec:
    """
    Build the default architecture for a model kind.

    Args:
        kind: "topdown" or "bottomup"
        n_rx: N
        n_tx: M
        overrides: Optional keys hidden_sizes, beta, threshold, reset,
            surrogate_slope, time_steps, dropout, output_beta (None values ignored)

    Returns:
        NetworkSpec with one identical LifParams per hidden layer
    """
    kind = ModelKind(kind)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    snn_config = get_snn_config()

    if kind == ModelKind.TOPDOWN:
        width = n_rx * n_tx
        hidden = tuple(overrides.get("hidden_sizes", DEFAULT_TOPDOWN_HIDDEN))
    else:
        width = n_tx
        hidden = tuple(overrides.get("hidden_sizes", DEFAULT_BOTTOMUP_HIDDEN))
    if not hidden:
        raise ConfigError("hidden_sizes must name at least one hidden layer")

    lif = LifParams.from_config({
        key: overrides.get(key) for key in ("beta", "threshold", "reset", "surrogate_slope")
    })
    dropout = float(overrides.get("dropout", snn_config["dropout"]))
    return NetworkSpec(
        layer_sizes=(width, *hidden, width),
        lif=tuple(lif for _ in hidden),
        dropout_rates=tuple(dropout for _ in hidden),
        time_steps=int(overrides.get("time_steps", snn_config["time_steps"])),
        output_beta=float(overrides.get("output_beta", lif.beta)),
    )


def decode_topdown(logits: np.ndarray) -> Association:
    """Row-wise argmax; ties resolve to the lowest TX index. No feasibility repair."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 2:
        raise ShapeMismatchError(f"expected an N x M logit matrix, got shape {logits.shape}")
    return tuple(int(j) for j in np.argmax(logits, axis=1))


def decode_bottomup(logits: np.ndarray) -> int:
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 1:
        raise ShapeMismatchError(f"expected an M-vector of logits, got shape {logits.shape}")
    return int(np.argmax(logits))


def encode_inputs(kind: Union[ModelKind, str], s: Standardizer, rates: np.ndarray) -> np.ndarray:
    """
    Network input rows for one rate matrix.

    Returns:
        (1, N*M) for top-down, (N, M) for bottom-up
    """
    z = standardize(s, rates)
    if ModelKind(kind) == ModelKind.TOPDOWN:
        return z.reshape(1, -1)
    return z


def _check_rates(model: Model, rates: np.ndarray) -> np.ndarray:
    rates = np.asarray(rates, dtype=np.float64)
    if rates.ndim != 2:
        raise ShapeMismatchError(f"expected a rate matrix, got shape {rates.shape}")
    if isinstance(model, TopDownModel):
        expected: Tuple[int, ...] = (model.n_rx, model.n_tx)
        if rates.shape != expected:
            raise ShapeMismatchError(f"model expects a {expected[0]} x {expected[1]} matrix, got {rates.shape}")
    elif rates.shape[1] != model.n_tx:
        raise ShapeMismatchError(f"model expects {model.n_tx} TX columns, got {rates.shape[1]}")
    return rates


def infer(model: Model, rates: np.ndarray) -> Tuple[Association, float]:
    """
    Predict an association and count the hidden spikes it took.

    Returns:
        Tuple of (association, total hidden-layer spikes over the whole inference)

    Raises:
        ShapeMismatchError: If ``rates`` does not fit the model
    """
    rates = _check_rates(model, rates)
    x = encode_inputs(model.kind, model.standardizer, rates)
    if isinstance(model, TopDownModel):
        logits, trace = forward(model.spec, model.weights, x[0], mode=Mode.EVAL)
        assoc = decode_topdown(logits.reshape(model.n_rx, model.n_tx))
        return assoc, float(trace.spike_count().sum())

    picks, spikes = [], 0.0
    for row in x:
        logits, trace = forward(model.spec, model.weights, row, mode=Mode.EVAL)
        picks.append(decode_bottomup(logits))
        spikes += float(trace.spike_count().sum())
    return tuple(picks), spikes


def predict(model: Model, rates: np.ndarray) -> Association:
    """
    Standardize, run the network in eval mode and decode.

    Bottom-up models run one forward pass per RX row, so row i's decision
    depends on row i only.
    """
    return infer(model, rates)[0]
