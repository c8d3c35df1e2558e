"""
Leaky integrate-and-fire neuron dynamics and the surrogate spike derivative.

    pre   = beta * u + i_in
    spike = 1 if pre >= threshold else 0
    u'    = pre - threshold * spike      (subtract reset)
    u'    = pre * (1 - spike)            (zero reset)
"""
import enum
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from src.errors import ConfigError
from src.snn.config import get_snn_config

ArrayLike = Union[float, np.ndarray]


class ResetMode(str, enum.Enum):
    SUBTRACT = "subtract"
    ZERO = "zero"


@dataclass(frozen=True)
class LifParams:
    beta: float = 0.9
    threshold: float = 1.0
    reset: ResetMode = ResetMode.SUBTRACT
    surrogate_slope: float = 25.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "reset", ResetMode(self.reset))
        except ValueError as e:
            raise ConfigError(f"unknown reset mode {self.reset!r}") from e
        if not 0.0 <= self.beta < 1.0:
            raise ConfigError(f"beta must be in [0, 1), got {self.beta}")
        if self.threshold <= 0:
            raise ConfigError(f"threshold must be > 0, got {self.threshold}")
        if self.surrogate_slope <= 0:
            raise ConfigError(f"surrogate_slope must be > 0, got {self.surrogate_slope}")

    @classmethod
    def from_config(cls, overrides: Optional[Dict[str, Any]] = None) -> "LifParams":
        """Defaults from get_snn_config(), with optional overrides."""
        snn_config = get_snn_config()
        values = {
            "beta": snn_config["beta"],
            "threshold": snn_config["threshold"],
            "reset": snn_config["reset"],
            "surrogate_slope": snn_config["surrogate_slope"],
        }
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "threshold": self.threshold,
            "reset": self.reset.value,
            "surrogate_slope": self.surrogate_slope,
        }


def integrate(u: ArrayLike, i_in: ArrayLike, p: LifParams) -> ArrayLike:
    """Leaky integration: membrane potential before the spike decision."""
    return p.beta * u + i_in


def fire(pre: ArrayLike, p: LifParams) -> Tuple[ArrayLike, ArrayLike]:
    """
    Spike decision and reset.

    Returns:
        Tuple of (u_next, spike) with spike in {0.0, 1.0}
    """
    spike = np.asarray(pre >= p.threshold, dtype=np.float64)
    if p.reset == ResetMode.SUBTRACT:
        u_next = pre - p.threshold * spike
    else:
        u_next = pre * (1.0 - spike)
    if np.ndim(spike) == 0:
        return float(u_next), float(spike)
    return u_next, spike


def lif_step(u: ArrayLike, i_in: ArrayLike, p: LifParams) -> Tuple[ArrayLike, ArrayLike]:
    """
    One LIF update.

    Args:
        u: Membrane potential (scalar or array)
        i_in: Input current, same shape as ``u``
        p: Neuron parameters

    Returns:
        Tuple of (u_next, spike)
    """
    return fire(integrate(u, i_in, p), p)


def surrogate_grad(x: ArrayLike, k: float) -> ArrayLike:
    """Reciprocal-quadratic stand-in for d(spike)/d(pre): 1 / (1 + k|x|)^2."""
    return 1.0 / (1.0 + k * np.abs(x)) ** 2
