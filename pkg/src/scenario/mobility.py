"""
Random-walk receiver mobility with reflecting area boundaries.
"""
import numpy as np

from src.scenario.config import ScenarioConfig


def reflect_into(values: np.ndarray, upper: float) -> np.ndarray:
    """
    Fold coordinates back into [0, upper] by mirror reflection at both edges.

    Works for displacements of any length (multiple bounces).
    """
    period = 2.0 * upper
    folded = np.mod(values, period)
    return np.where(folded > upper, period - folded, folded)


def initial_positions(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Uniform receiver placement over the area at ``cfg.rx_height``."""
    xy = rng.uniform(0.0, 1.0, size=(cfg.n_rx, 2)) * np.array([cfg.area_width, cfg.area_height])
    z = np.full((cfg.n_rx, 1), cfg.rx_height)
    return np.hstack([xy, z])


def step_positions(positions: np.ndarray, cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """
    Move every receiver by ``cfg.step_size`` in a uniformly random planar direction.

    Args:
        positions: (N, 3) receiver coordinates, inside the area
        cfg: Scenario configuration (area and step size)
        rng: Random stream for this step

    Returns:
        New (N, 3) array; altitude is unchanged
    """
    positions = np.asarray(positions, dtype=np.float64)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=positions.shape[0])
    moved = positions.copy()
    if cfg.step_size == 0:
        return moved
    moved[:, 0] = reflect_into(positions[:, 0] + cfg.step_size * np.cos(theta), cfg.area_width)
    moved[:, 1] = reflect_into(positions[:, 1] + cfg.step_size * np.sin(theta), cfg.area_height)
    return moved
