"""
Scenario configuration: transmitters, channel parameters and the scenario itself.

These are pydantic models so the JSON config file and in-code construction share
one set of validation rules.
"""
import enum
import logging
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config import build_config, load_json_config, resolve_seed
from src.utils import config_digest

logger = logging.getLogger(__name__)


class TxKind(str, enum.Enum):
    BASE_STATION = "base_station"
    RIS_RELAY = "ris_relay"


class TxNode(BaseModel):
    """
    A transmitter column of the rate matrix.

    A ``ris_relay`` is a lossless two-hop reflector of the base station at
    ``anchor_tx``. When ``tx_power_dbm`` is omitted for a relay, the anchor's
    transmit power is used.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    position: Tuple[float, float, float]
    kind: TxKind = TxKind.BASE_STATION
    tx_power_dbm: Optional[float] = None
    anchor_tx: Optional[int] = None
    gain_dbi: float = 0.0

    @model_validator(mode="after")
    def _check_node(self) -> "TxNode":
        if self.position[2] < 0:
            raise ValueError("altitude must be >= 0")
        if self.kind == TxKind.BASE_STATION:
            if self.tx_power_dbm is None:
                raise ValueError("base_station requires tx_power_dbm")
            if self.anchor_tx is not None:
                raise ValueError("anchor_tx is only valid for ris_relay nodes")
        elif self.anchor_tx is None:
            raise ValueError("ris_relay requires anchor_tx")
        return self


class ChannelParams(BaseModel):
    """Log-distance path loss with log-normal shadowing."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    pl0_db: float = 40.0
    ref_distance: float = Field(1.0, gt=0)
    exponent: float = Field(3.0, gt=0)
    shadow_sigma_db: float = Field(4.0, ge=0)
    bandwidth_hz: float = Field(20e6, gt=0)
    noise_dbm: float = -94.0


class ScenarioConfig(BaseModel):
    """
    Complete description of a synthetic scenario.

    The generated dataset is a pure function of this object.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    area_width: float = Field(500.0, gt=0)
    area_height: float = Field(500.0, gt=0)
    n_rx: int = Field(6, ge=1)
    rx_height: float = Field(1.5, ge=0)
    tx_nodes: List[TxNode] = Field(min_length=1)
    n_steps: int = Field(500, ge=1)
    step_size: float = Field(5.0, ge=0)
    channel: ChannelParams = Field(default_factory=ChannelParams)
    seed: int = Field(0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _check_anchors(self) -> "ScenarioConfig":
        for j, node in enumerate(self.tx_nodes):
            if node.kind != TxKind.RIS_RELAY:
                continue
            anchor = node.anchor_tx
            if anchor is None or not 0 <= anchor < len(self.tx_nodes):
                raise ValueError(f"tx_nodes[{j}]: anchor_tx {anchor} out of range")
            if self.tx_nodes[anchor].kind != TxKind.BASE_STATION:
                raise ValueError(f"tx_nodes[{j}]: anchor_tx {anchor} is not a base_station")
        return self

    @property
    def n_tx(self) -> int:
        return len(self.tx_nodes)

    def tx_power(self, j: int) -> float:
        """Effective transmit power of node ``j`` in dBm."""
        node = self.tx_nodes[j]
        if node.tx_power_dbm is not None:
            return node.tx_power_dbm
        return self.tx_nodes[node.anchor_tx].tx_power_dbm

    def digest(self) -> str:
        return config_digest(self.model_dump(mode="json"))


def scenario_config_from_dict(data: Dict[str, Any], seed: Optional[int] = None) -> ScenarioConfig:
    """
    Build a validated ScenarioConfig, applying seed precedence.

    Args:
        data: Raw mapping mirroring ScenarioConfig field names
        seed: Seed from the command line; overrides the mapping's seed

    Returns:
        Validated ScenarioConfig

    Raises:
        ConfigError: If validation fails
    """
    data = dict(data)
    data["seed"] = resolve_seed(seed, data.get("seed"))
    return build_config(ScenarioConfig, data)


def load_scenario_config(config_path: str, seed: Optional[int] = None) -> ScenarioConfig:
    """Load and validate a scenario JSON config file."""
    cfg = scenario_config_from_dict(load_json_config(config_path), seed=seed)
    logger.info(
        f"Scenario: {cfg.n_rx} RX, {cfg.n_tx} TX, {cfg.n_steps} steps, seed={cfg.seed}"
    )
    return cfg
