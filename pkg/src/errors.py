"""
Exception hierarchy for the association pipeline.

The CLI maps these onto exit codes (see src.cli.categorize_error), so every
error raised on a user-facing path should be one of these types.
"""
from typing import Optional


class SpikeAssocError(Exception):
    """Base class for all pipeline errors."""


class ConfigError(SpikeAssocError, ValueError):
    """Invalid configuration file, flag or parameter."""


class DegenerateGeometryError(SpikeAssocError, ValueError):
    """A receiver coincides with a transmitter (zero link distance)."""


class ShapeMismatchError(SpikeAssocError, ValueError):
    """Array dimensions disagree with a model, spec or association."""


class InfeasibleInstanceError(SpikeAssocError, ValueError):
    """
    No association satisfies the capacity constraint (N > M * L).

    Attributes:
        step: Time-step index of the offending instance, when known
    """

    def __init__(self, message: str, step: Optional[int] = None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step


class DataFormatError(SpikeAssocError):
    """Malformed, truncated or unsupported dataset, label or checkpoint file."""


class TrainingError(SpikeAssocError):
    """Training cannot proceed (empty split, zero epochs, inconsistent labels)."""
