"""
Parametric channel model: log-distance path loss, log-normal shadowing and
Shannon-capacity rates.

A RIS relay is modelled as a lossless two-hop path (anchor BS -> RIS -> RX);
the two segment losses add in dB and a single shadowing draw applies to the link.
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np

from src.errors import ConfigError, DegenerateGeometryError
from src.scenario.config import ChannelParams, TxKind, TxNode

logger = logging.getLogger(__name__)


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean 3-D distance in meters."""
    return math.dist(tuple(a), tuple(b))


def path_loss_db(d: float, ch: ChannelParams) -> float:
    """
    Deterministic log-distance path loss (no shadowing).

    Raises:
        DegenerateGeometryError: If ``d`` is zero
    """
    if d <= 0:
        raise DegenerateGeometryError("degenerate geometry: zero link distance")
    return ch.pl0_db + 10.0 * ch.exponent * math.log10(d / ch.ref_distance)


def shannon_rate(snr_db: float, bandwidth_hz: float) -> float:
    """Capacity in bits/s for an SNR given in dB."""
    return bandwidth_hz * math.log2(1.0 + 10.0 ** (snr_db / 10.0))


def link_rate(tx: TxNode, rx_pos: Sequence[float], ch: ChannelParams,
              rng: np.random.Generator, anchor: Optional[TxNode] = None) -> float:
    """
    Achievable rate of one TX -> RX link.

    Args:
        tx: Transmitting node (base station or RIS relay)
        rx_pos: Receiver coordinates in meters
        ch: Channel parameters
        rng: Random stream dedicated to this link
        anchor: Anchor base station, required when ``tx`` is a RIS relay

    Returns:
        Rate in bits/s (finite, >= 0)

    Raises:
        DegenerateGeometryError: If any hop has zero length
        ConfigError: If a RIS relay is given without its anchor
    """
    if tx.kind == TxKind.RIS_RELAY:
        if anchor is None:
            raise ConfigError("ris_relay link requires its anchor base station")
        loss = path_loss_db(distance(anchor.position, tx.position), ch)
        loss += path_loss_db(distance(tx.position, rx_pos), ch)
        power = tx.tx_power_dbm if tx.tx_power_dbm is not None else anchor.tx_power_dbm
    else:
        loss = path_loss_db(distance(tx.position, rx_pos), ch)
        power = tx.tx_power_dbm

    loss += float(rng.normal(0.0, ch.shadow_sigma_db))
    snr_db = power + tx.gain_dbi - loss - ch.noise_dbm
    return shannon_rate(snr_db, ch.bandwidth_hz)
