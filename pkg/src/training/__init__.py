"""
Training loop, learning-rate schedule and checkpoint persistence.
"""
from .config import (
    LossSettings,
    NetworkOverrides,
    PlateauConfig,
    TrainConfig,
    load_train_config,
    train_config_from_dict,
)
from .checkpoint import (
    FORMAT_VERSION,
    Checkpoint,
    CheckpointMeta,
    load_checkpoint,
    save_checkpoint,
)
from .trainer import (
    EpochRecord,
    TrainHistory,
    reduce_lr_on_plateau,
    split_dataset,
    train,
    write_history,
)

__all__ = [
    "LossSettings",
    "NetworkOverrides",
    "PlateauConfig",
    "TrainConfig",
    "load_train_config",
    "train_config_from_dict",
    "FORMAT_VERSION",
    "Checkpoint",
    "CheckpointMeta",
    "load_checkpoint",
    "save_checkpoint",
    "EpochRecord",
    "TrainHistory",
    "reduce_lr_on_plateau",
    "split_dataset",
    "train",
    "write_history",
]
