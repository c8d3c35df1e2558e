"""
Spiking-network default hyperparameters.

None of these values come from measurements; they are common LIF training
settings and every one can be overridden through the environment or the
training config file.
"""
import os
from typing import Any, Dict
import logging

# Try to load python-dotenv if available
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

logger = logging.getLogger(__name__)


def get_snn_config() -> Dict[str, Any]:
    """
    Get spiking-network defaults from environment variables.

    Returns:
        Dictionary with LIF, temporal, dropout and Adam defaults
    """
    return {
        "beta": float(os.getenv("SNN_BETA", "0.9")),
        "threshold": float(os.getenv("SNN_THRESHOLD", "1.0")),
        "reset": os.getenv("SNN_RESET", "subtract").lower(),
        "surrogate_slope": float(os.getenv("SNN_SURROGATE_SLOPE", "25")),
        "time_steps": int(os.getenv("SNN_TIME_STEPS", "25")),
        "dropout": float(os.getenv("SNN_DROPOUT", "0.2")),
        "adam_b1": float(os.getenv("SNN_ADAM_B1", "0.9")),
        "adam_b2": float(os.getenv("SNN_ADAM_B2", "0.999")),
        "adam_eps": float(os.getenv("SNN_ADAM_EPS", "1e-8")),
    }
