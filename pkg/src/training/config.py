"""
Training configuration (JSON file mirroring TrainConfig field names).

Every default below is a desk-scale choice; none is a measured value.
"""
import logging
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from src.config import build_config, load_json_config, resolve_seed
from src.models import LossConfig
from src.snn import ResetMode
from src.utils import config_digest

logger = logging.getLogger(__name__)


class PlateauConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    factor: float = Field(0.5, gt=0, lt=1)
    patience: int = Field(10, ge=1)
    min_lr: float = Field(1e-5, ge=0)


class LossSettings(BaseModel):
    """Penalty weight and capacity; ``limit`` falls back to the labels' L."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    penalty_weight: float = Field(0.1, ge=0)
    limit: Optional[int] = Field(None, ge=0)

    def resolve(self, label_limit: int) -> LossConfig:
        limit = self.limit if self.limit is not None else label_limit
        return LossConfig(penalty_weight=self.penalty_weight, limit=limit)


class NetworkOverrides(BaseModel):
    """Architecture overrides; unset fields use the model defaults and SNN_* environment."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    hidden_sizes: Optional[List[int]] = Field(None, min_length=1)
    beta: Optional[float] = Field(None, ge=0, lt=1)
    threshold: Optional[float] = Field(None, gt=0)
    reset: Optional[ResetMode] = None
    surrogate_slope: Optional[float] = Field(None, gt=0)
    time_steps: Optional[int] = Field(None, ge=1)
    dropout: Optional[float] = Field(None, ge=0, lt=1)
    output_beta: Optional[float] = Field(None, ge=0, lt=1)


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    epochs_max: int = Field(200, ge=0)
    batch_size: int = Field(32, ge=1)
    lr0: float = Field(1e-3, gt=0)
    plateau: PlateauConfig = Field(default_factory=PlateauConfig)
    early_stop_patience: int = Field(25, ge=1)
    split_ratio: float = Field(0.8, gt=0, lt=1)
    seed: int = Field(0, ge=0, lt=2**64)
    loss: LossSettings = Field(default_factory=LossSettings)
    network: NetworkOverrides = Field(default_factory=NetworkOverrides)

    def digest(self) -> str:
        return config_digest(self.model_dump(mode="json"))


def train_config_from_dict(data: Dict[str, Any], seed: Optional[int] = None) -> TrainConfig:
    """
    Build a validated TrainConfig, applying seed precedence.

    Raises:
        ConfigError: If validation fails
    """
    data = dict(data)
    data["seed"] = resolve_seed(seed, data.get("seed"))
    return build_config(TrainConfig, data)


def load_train_config(config_path: Optional[str] = None, seed: Optional[int] = None) -> TrainConfig:
    """Load a training config file; without a path, defaults are used."""
    data = load_json_config(config_path) if config_path else {}
    cfg = train_config_from_dict(data, seed=seed)
    logger.info(
        f"Training: epochs_max={cfg.epochs_max}, batch_size={cfg.batch_size}, lr0={cfg.lr0}, seed={cfg.seed}"
    )
    return cfg
