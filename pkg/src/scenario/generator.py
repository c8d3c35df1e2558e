"""
Dataset generation: mobility trajectory plus one rate matrix per time step.

Every random draw comes from a stream keyed by (seed, stream tag, indices), so
the dataset is a pure function of the ScenarioConfig and steps can be computed
in any order or in parallel.
"""
import logging
from functools import partial
from typing import Tuple

import numpy as np

from src.scenario.channel import link_rate
from src.scenario.config import ScenarioConfig, TxKind
from src.scenario.mobility import initial_positions, step_positions
from src.scenario.models import Dataset, Instance, RateMatrix
from src.utils import parallel_map

logger = logging.getLogger(__name__)

# Stream tags keep placement, mobility and link draws in disjoint RNG streams.
PLACEMENT_STREAM = 0x504C4143
MOBILITY_STREAM = 0x4D4F4249
LINK_STREAM = 0x4C494E4B


def derive_rng(seed: int, stream: int, *indices: int) -> np.random.Generator:
    """Counter-based generator for (seed, stream, indices...)."""
    return np.random.default_rng(np.random.SeedSequence([seed, stream, *indices]))


def trajectory(cfg: ScenarioConfig) -> np.ndarray:
    """
    Receiver positions for every step.

    Returns:
        Array of shape (n_steps, n_rx, 3); entry 0 is the initial placement
    """
    positions = initial_positions(cfg, derive_rng(cfg.seed, PLACEMENT_STREAM))
    frames = [positions]
    for step in range(1, cfg.n_steps):
        positions = step_positions(positions, cfg, derive_rng(cfg.seed, MOBILITY_STREAM, step))
        frames.append(positions)
    return np.stack(frames)


def rate_matrix(cfg: ScenarioConfig, step: int, positions: np.ndarray) -> RateMatrix:
    """
    Rates for every (RX, TX) pair at one step.

    Args:
        cfg: Scenario configuration
        step: Step index (part of each link's RNG key)
        positions: (N, 3) receiver coordinates

    Returns:
        (N, M) rate matrix in bits/s
    """
    rates = np.empty((cfg.n_rx, cfg.n_tx), dtype=np.float64)
    for i in range(cfg.n_rx):
        for j, tx in enumerate(cfg.tx_nodes):
            anchor = cfg.tx_nodes[tx.anchor_tx] if tx.kind == TxKind.RIS_RELAY else None
            rng = derive_rng(cfg.seed, LINK_STREAM, step, i, j)
            rates[i, j] = link_rate(tx, positions[i], cfg.channel, rng, anchor=anchor)
    return rates


def _build_instance(item: Tuple[int, np.ndarray], cfg: ScenarioConfig) -> Instance:
    step, positions = item
    return Instance(step=step, rates=rate_matrix(cfg, step, positions), positions=positions)


def generate_dataset(cfg: ScenarioConfig, jobs: int = 1) -> Dataset:
    """
    Generate a complete scenario dataset.

    Args:
        cfg: Validated scenario configuration
        jobs: Worker processes for per-step rate computation

    Returns:
        Dataset with ``cfg.n_steps`` instances ordered by step
    """
    logger.info(f"Generating {cfg.n_steps} steps ({cfg.n_rx} RX x {cfg.n_tx} TX), jobs={jobs}")
    frames = trajectory(cfg)
    instances = parallel_map(partial(_build_instance, cfg=cfg), list(enumerate(frames)), jobs=jobs)
    dataset = Dataset(instances=instances, config_digest=cfg.digest())
    dataset.validate()
    logger.info(f"Generated dataset {dataset.config_digest[:12]} with {len(dataset)} instances")
    return dataset
