"""
Association estimators built on the spiking network engine.
"""
from .preprocessing import Standardizer, fit_standardizer, standardize
from .losses import LossConfig, bottomup_batch_loss, bottomup_loss, topdown_loss
from .estimators import (
    BottomUpModel,
    Model,
    ModelKind,
    TopDownModel,
    decode_bottomup,
    decode_topdown,
    default_spec,
    encode_inputs,
    infer,
    predict,
)

__all__ = [
    "Standardizer",
    "fit_standardizer",
    "standardize",
    "LossConfig",
    "bottomup_batch_loss",
    "bottomup_loss",
    "topdown_loss",
    "BottomUpModel",
    "Model",
    "ModelKind",
    "TopDownModel",
    "decode_bottomup",
    "decode_topdown",
    "default_spec",
    "encode_inputs",
    "infer",
    "predict",
]
