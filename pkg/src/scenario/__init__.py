"""
Synthetic scenario generation (mobility + parametric channel).
"""
from .config import (
    ChannelParams,
    ScenarioConfig,
    TxKind,
    TxNode,
    load_scenario_config,
    scenario_config_from_dict,
)
from .models import Dataset, Instance, RateMatrix, as_rate_matrix
from .mobility import step_positions
from .channel import link_rate, path_loss_db
from .generator import derive_rng, generate_dataset
from .dataset_io import read_dataset, write_dataset

__all__ = [
    "ChannelParams",
    "ScenarioConfig",
    "TxKind",
    "TxNode",
    "load_scenario_config",
    "scenario_config_from_dict",
    "Dataset",
    "Instance",
    "RateMatrix",
    "as_rate_matrix",
    "step_positions",
    "link_rate",
    "path_loss_db",
    "derive_rng",
    "generate_dataset",
    "read_dataset",
    "write_dataset",
]
