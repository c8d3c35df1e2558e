"""
Adam optimizer over Weights (bias-corrected moment estimates).
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.errors import ShapeMismatchError
from src.snn.config import get_snn_config
from src.snn.network import Gradients, Weights


@dataclass
class AdamState:
    """First/second moment accumulators, one pair of arrays per parameter array."""
    m: List[np.ndarray]
    v: List[np.ndarray]
    step: int = 0
    b1: float = 0.9
    b2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_weights(cls, w: Weights, b1: Optional[float] = None, b2: Optional[float] = None,
                    eps: Optional[float] = None) -> "AdamState":
        snn_config = get_snn_config()
        return cls(
            m=[np.zeros_like(a) for a in w.arrays()],
            v=[np.zeros_like(a) for a in w.arrays()],
            step=0,
            b1=snn_config["adam_b1"] if b1 is None else b1,
            b2=snn_config["adam_b2"] if b2 is None else b2,
            eps=snn_config["adam_eps"] if eps is None else eps,
        )


def adam_step(w: Weights, grads: Gradients, st: AdamState, lr: float) -> Tuple[Weights, AdamState]:
    """
    One Adam update; inputs are left untouched.

    Args:
        w: Current parameters
        grads: Gradients with the structure of ``w``
        st: Optimizer state for ``w``
        lr: Learning rate

    Returns:
        Tuple of (updated weights, updated state)

    Raises:
        ShapeMismatchError: If weights, gradients and state disagree
    """
    params, gs = w.arrays(), grads.arrays()
    if len(params) != len(gs) or len(params) != len(st.m):
        raise ShapeMismatchError("weights, gradients and optimizer state differ in layer count")

    step = st.step + 1
    bc1 = 1.0 - st.b1 ** step
    bc2 = 1.0 - st.b2 ** step
    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, gs, st.m, st.v):
        if p.shape != g.shape or p.shape != m.shape:
            raise ShapeMismatchError(f"parameter {p.shape} / gradient {g.shape} / state {m.shape} mismatch")
        m = st.b1 * m + (1.0 - st.b1) * g
        v = st.b2 * v + (1.0 - st.b2) * (g * g)
        new_params.append(p - lr * (m / bc1) / (np.sqrt(v / bc2) + st.eps))
        new_m.append(m)
        new_v.append(v)

    new_state = AdamState(m=new_m, v=new_v, step=step, b1=st.b1, b2=st.b2, eps=st.eps)
    return Weights.from_arrays(new_params), new_state
