"""
Layered spiking network: spec, parameters, temporal forward pass and
backpropagation through time.

Hidden layers are LIF populations; the output layer is a non-spiking leaky
integrator whose potential at the last time step is read out as logits. The
input vector is injected as a constant current at every time step. All
functions accept a single sample (1-D input) or a batch (2-D, one row per
sample).
"""
import enum
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import ConfigError, ShapeMismatchError
from src.snn.neuron import LifParams, ResetMode, fire, integrate, surrogate_grad

logger = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    TRAIN = "train"
    EVAL = "eval"


@dataclass(frozen=True)
class NetworkSpec:
    """
    Network architecture.

    Attributes:
        layer_sizes: [input, hidden_1, ..., hidden_H, output]
        lif: One LifParams per hidden layer
        dropout_rates: One rate in [0, 1) per hidden layer
        time_steps: Simulation length T
        output_beta: Leak of the non-spiking output integrator
    """
    layer_sizes: Tuple[int, ...]
    lif: Tuple[LifParams, ...]
    dropout_rates: Tuple[float, ...]
    time_steps: int = 25
    output_beta: float = 0.9

    def __post_init__(self):
        object.__setattr__(self, "layer_sizes", tuple(int(n) for n in self.layer_sizes))
        object.__setattr__(self, "lif", tuple(self.lif))
        object.__setattr__(self, "dropout_rates", tuple(float(r) for r in self.dropout_rates))
        hidden = len(self.layer_sizes) - 2
        if hidden < 1:
            raise ConfigError("network needs at least one hidden layer")
        if any(n < 1 for n in self.layer_sizes):
            raise ConfigError(f"layer sizes must be >= 1, got {self.layer_sizes}")
        if len(self.lif) != hidden:
            raise ConfigError(f"expected {hidden} LifParams, got {len(self.lif)}")
        if len(self.dropout_rates) != hidden:
            raise ConfigError(f"expected {hidden} dropout rates, got {len(self.dropout_rates)}")
        if any(not 0.0 <= r < 1.0 for r in self.dropout_rates):
            raise ConfigError(f"dropout rates must be in [0, 1), got {self.dropout_rates}")
        if self.time_steps < 1:
            raise ConfigError(f"time_steps must be >= 1, got {self.time_steps}")
        if not 0.0 <= self.output_beta < 1.0:
            raise ConfigError(f"output_beta must be in [0, 1), got {self.output_beta}")

    @property
    def n_hidden(self) -> int:
        return len(self.layer_sizes) - 2

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_size(self) -> int:
        return self.layer_sizes[-1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "layer_sizes": list(self.layer_sizes),
            "lif": [p.to_dict() for p in self.lif],
            "dropout_rates": list(self.dropout_rates),
            "time_steps": self.time_steps,
            "output_beta": self.output_beta,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NetworkSpec":
        return cls(
            layer_sizes=tuple(data["layer_sizes"]),
            lif=tuple(LifParams(**p) for p in data["lif"]),
            dropout_rates=tuple(data["dropout_rates"]),
            time_steps=int(data["time_steps"]),
            output_beta=float(data["output_beta"]),
        )


@dataclass
class LayerParams:
    w: np.ndarray  # (out, in)
    b: np.ndarray  # (out,)


@dataclass
class Weights:
    """Per-layer weight matrices and bias vectors (hidden layers first, output last)."""
    layers: List[LayerParams]

    def arrays(self) -> List[np.ndarray]:
        """Flat view [w_0, b_0, w_1, b_1, ...]; the arrays are shared, not copied."""
        out: List[np.ndarray] = []
        for layer in self.layers:
            out.extend((layer.w, layer.b))
        return out

    @classmethod
    def from_arrays(cls, arrays: Sequence[np.ndarray]) -> "Weights":
        return cls([LayerParams(arrays[k], arrays[k + 1]) for k in range(0, len(arrays), 2)])

    def copy(self) -> "Weights":
        return Weights.from_arrays([a.copy() for a in self.arrays()])

    def zeros_like(self) -> "Weights":
        return Weights.from_arrays([np.zeros_like(a) for a in self.arrays()])


# Gradients have exactly the structure of the parameters they belong to.
Gradients = Weights


@dataclass
class ForwardTrace:
    """
    Everything backward() needs from one forward call.

    Per hidden layer l, arrays have shape (T, B, n_l).
    """
    inputs: np.ndarray                 # (B, in)
    currents: List[np.ndarray]         # input current per hidden layer
    pre: List[np.ndarray]              # potential before spike decision
    spikes: List[np.ndarray]           # 0/1 indicators
    masks: List[np.ndarray]            # (B, n_l) dropout scaling, ones in eval mode
    out_potentials: np.ndarray         # (T, B, out)
    batched: bool = True

    @property
    def time_steps(self) -> int:
        return self.out_potentials.shape[0]

    @property
    def logits(self) -> np.ndarray:
        return self.out_potentials[-1]

    def spike_count(self) -> np.ndarray:
        """Total hidden-layer spikes per sample, shape (B,)."""
        return sum(s.sum(axis=(0, 2)) for s in self.spikes)


def check_weights(spec: NetworkSpec, w: Weights) -> None:
    """
    Raises:
        ShapeMismatchError: If ``w`` does not match ``spec``
    """
    if len(w.layers) != len(spec.layer_sizes) - 1:
        raise ShapeMismatchError(f"expected {len(spec.layer_sizes) - 1} layers, got {len(w.layers)}")
    for k, layer in enumerate(w.layers):
        expected = (spec.layer_sizes[k + 1], spec.layer_sizes[k])
        if layer.w.shape != expected or layer.b.shape != (expected[0],):
            raise ShapeMismatchError(
                f"layer {k}: weight {layer.w.shape} / bias {layer.b.shape}, expected {expected} / {(expected[0],)}"
            )


def init_weights(spec: NetworkSpec, seed: int) -> Weights:
    """
    Uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) weights, zero biases.

    Args:
        spec: Network architecture
        seed: Seed for the initialization stream

    Returns:
        Fresh Weights
    """
    rng = np.random.default_rng(seed)
    layers = []
    for fan_in, fan_out in zip(spec.layer_sizes[:-1], spec.layer_sizes[1:]):
        bound = np.sqrt(1.0 / fan_in)
        layers.append(LayerParams(
            w=rng.uniform(-bound, bound, size=(fan_out, fan_in)),
            b=np.zeros(fan_out),
        ))
    return Weights(layers)


def _dropout_masks(spec: NetworkSpec, batch: int, mode: Mode,
                   rng: Optional[np.random.Generator]) -> List[np.ndarray]:
    masks = []
    for rate, size in zip(spec.dropout_rates, spec.layer_sizes[1:-1]):
        if mode == Mode.EVAL or rate == 0.0:
            masks.append(np.ones((batch, size)))
            continue
        if rng is None:
            raise ConfigError("train-mode forward with dropout needs an rng")
        keep = rng.random((batch, size)) >= rate
        masks.append(keep / (1.0 - rate))
    return masks


def forward(spec: NetworkSpec, w: Weights, x: np.ndarray, mode: Mode = Mode.EVAL,
            rng: Optional[np.random.Generator] = None) -> Tuple[np.ndarray, ForwardTrace]:
    """
    Simulate the network for ``spec.time_steps`` steps.

    Dropout masks are drawn once per call and reused across time steps;
    eval mode applies no mask and no rescaling.

    Args:
        spec: Network architecture
        w: Parameters
        x: Input vector (in,) or batch (B, in)
        mode: Mode.TRAIN or Mode.EVAL
        rng: Random stream for dropout masks (train mode only)

    Returns:
        Tuple of (logits, trace); logits have shape (out,) or (B, out)

    Raises:
        ShapeMismatchError: If input or weights do not match ``spec``
    """
    mode = Mode(mode)
    check_weights(spec, w)
    x = np.asarray(x, dtype=np.float64)
    batched = x.ndim == 2
    inputs = x if batched else x.reshape(1, -1)
    if inputs.ndim != 2 or inputs.shape[1] != spec.input_size:
        raise ShapeMismatchError(f"input has shape {x.shape}, network expects {spec.input_size} features")

    batch = inputs.shape[0]
    T = spec.time_steps
    hidden_sizes = spec.layer_sizes[1:-1]
    masks = _dropout_masks(spec, batch, mode, rng)

    currents = [np.empty((T, batch, n)) for n in hidden_sizes]
    pre = [np.empty((T, batch, n)) for n in hidden_sizes]
    spikes = [np.empty((T, batch, n)) for n in hidden_sizes]
    out_potentials = np.empty((T, batch, spec.output_size))

    u = [np.zeros((batch, n)) for n in hidden_sizes]
    u_out = np.zeros((batch, spec.output_size))
    first = w.layers[0]
    constant_current = inputs @ first.w.T + first.b
    out_layer = w.layers[-1]

    for t in range(T):
        signal = None
        for l, p in enumerate(spec.lif):
            if l == 0:
                current = constant_current
            else:
                current = signal @ w.layers[l].w.T + w.layers[l].b
            potential = integrate(u[l], current, p)
            u[l], spike = fire(potential, p)
            currents[l][t] = current
            pre[l][t] = potential
            spikes[l][t] = spike
            signal = spike * masks[l]
        u_out = spec.output_beta * u_out + signal @ out_layer.w.T + out_layer.b
        out_potentials[t] = u_out

    trace = ForwardTrace(
        inputs=inputs,
        currents=currents,
        pre=pre,
        spikes=spikes,
        masks=masks,
        out_potentials=out_potentials,
        batched=batched,
    )
    logits = u_out.copy() if batched else u_out[0].copy()
    return logits, trace


def backward(spec: NetworkSpec, w: Weights, trace: ForwardTrace, dloss_dlogits: np.ndarray) -> Gradients:
    """
    Backpropagation through time with surrogate spike derivatives.

    The reset term is detached: gradient flows through the leak/integration
    path only (d u'/d pre = 1 for subtract reset, 1 - spike for zero reset).
    Gradients are summed over the batch in sample order.

    Args:
        spec: Network architecture used for the forward pass
        w: Parameters used for the forward pass
        trace: Trace returned by forward()
        dloss_dlogits: Gradient of the loss w.r.t. the logits, same shape as the logits

    Returns:
        Gradients with the structure of ``w``

    Raises:
        ShapeMismatchError: If the trace does not belong to ``spec``/``w``
    """
    check_weights(spec, w)
    if trace.time_steps != spec.time_steps or len(trace.spikes) != spec.n_hidden:
        raise ShapeMismatchError("trace was not produced with this network spec")
    g = np.asarray(dloss_dlogits, dtype=np.float64)
    g = g if g.ndim == 2 else g.reshape(1, -1)
    if g.shape != trace.logits.shape:
        raise ShapeMismatchError(f"dLoss/dlogits has shape {g.shape}, logits have {trace.logits.shape}")

    grads = w.zeros_like()
    H = spec.n_hidden
    out_layer = w.layers[-1]
    carry = [np.zeros_like(trace.pre[l][0]) for l in range(H)]
    first_layer_delta = np.zeros_like(trace.pre[0][0])
    delta_out = g

    for t in range(spec.time_steps - 1, -1, -1):
        top_signal = trace.spikes[H - 1][t] * trace.masks[H - 1]
        grads.layers[-1].w += delta_out.T @ top_signal
        grads.layers[-1].b += delta_out.sum(axis=0)
        delta_signal = delta_out @ out_layer.w

        for l in range(H - 1, -1, -1):
            p = spec.lif[l]
            delta_spike = delta_signal * trace.masks[l]
            through_reset = carry[l] if p.reset == ResetMode.SUBTRACT else carry[l] * (1.0 - trace.spikes[l][t])
            delta_pre = delta_spike * surrogate_grad(trace.pre[l][t] - p.threshold, p.surrogate_slope) + through_reset
            carry[l] = p.beta * delta_pre
            if l == 0:
                first_layer_delta += delta_pre
            else:
                below = trace.spikes[l - 1][t] * trace.masks[l - 1]
                grads.layers[l].w += delta_pre.T @ below
                grads.layers[l].b += delta_pre.sum(axis=0)
                delta_signal = delta_pre @ w.layers[l].w

        delta_out = spec.output_beta * delta_out

    # Layer-1 input is constant over time, so its deltas can be summed first.
    grads.layers[0].w += first_layer_delta.T @ trace.inputs
    grads.layers[0].b += first_layer_delta.sum(axis=0)
    return grads
