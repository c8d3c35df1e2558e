"""
From-scratch spiking neural network engine (LIF layers, BPTT, Adam).
"""
from .config import get_snn_config
from .neuron import LifParams, ResetMode, lif_step, surrogate_grad
from .network import (
    ForwardTrace,
    Gradients,
    LayerParams,
    Mode,
    NetworkSpec,
    Weights,
    backward,
    forward,
    init_weights,
)
from .optim import AdamState, adam_step

__all__ = [
    "get_snn_config",
    "LifParams",
    "ResetMode",
    "lif_step",
    "surrogate_grad",
    "ForwardTrace",
    "Gradients",
    "LayerParams",
    "Mode",
    "NetworkSpec",
    "Weights",
    "backward",
    "forward",
    "init_weights",
    "AdamState",
    "adam_step",
]
