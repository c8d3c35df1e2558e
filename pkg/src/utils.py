"""
Utility functions shared across the association pipeline.
"""
import hashlib
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")


class ColoredFormatter(logging.Formatter):
    """Custom formatter that adds colors to log levels."""
    COLORS = {
        "DEBUG": "\033[94m",      # Blue
        "INFO": "\033[92m",       # Green
        "WARNING": "\033[93m",    # Yellow
        "ERROR": "\033[91m",      # Red
        "CRITICAL": "\033[91m",   # Red
        "RESET": "\033[0m",
    }

    def format(self, record):
        log_message = super().format(record)
        if getattr(record, "no_color", False):
            return log_message
        color = self.COLORS.get(record.levelname, self.COLORS["RESET"])
        return f"{color}{log_message}{self.COLORS['RESET']}"


LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(verbose: bool = False, log_file: Optional[str] = None,
                  level: Optional[str] = None) -> None:
    """
    Set up logging configuration with colored output.

    Console output goes to stderr; stdout is reserved for command results.

    Args:
        verbose: If True, set log level to DEBUG
        log_file: Optional path to log file
        level: Explicit level name (e.g. "WARNING"); ignored when verbose is set
    """
    if verbose:
        log_level = logging.DEBUG
    else:
        log_level = getattr(logging, (level or "INFO").upper(), logging.INFO)

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(ColoredFormatter(LOG_FORMAT))
    handlers: List[logging.Handler] = [stream_handler]

    if log_file:
        ensure_directory(str(Path(log_file).parent))
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handlers.append(file_handler)

    logging.basicConfig(level=log_level, format=LOG_FORMAT, handlers=handlers, force=True)


def ensure_directory(path: str) -> Path:
    """
    Ensure a directory exists, creating it if necessary.

    Args:
        path: Path to the directory

    Returns:
        Path object for the directory
    """
    dir_path = Path(path)
    dir_path.mkdir(parents=True, exist_ok=True)
    return dir_path


def canonical_json(data: Any) -> str:
    """Compact, key-sorted JSON used for hashing and byte-stable files."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_digest(data: Any) -> str:
    """
    SHA-256 hex digest of a JSON-serializable configuration.

    Args:
        data: Plain dict/list structure (e.g. a pydantic ``model_dump(mode="json")``)

    Returns:
        64-character hex string
    """
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def format_number(value: float) -> str:
    """
    Locale-independent number formatting for console output.

    Integral values print without a fractional part (``12``), everything else
    uses the shortest repr that round-trips.
    """
    value = float(value)
    if math.isfinite(value) and value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def parallel_map(func: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> List[R]:
    """
    Order-preserving map, optionally across worker processes.

    ``func`` must be picklable (a module-level function or a functools.partial of one).
    Results are returned in input order, so output is identical for any ``jobs``.

    Args:
        func: Function applied to each item
        items: Inputs
        jobs: Number of worker processes; 1 runs inline

    Returns:
        List of results in input order
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    workers = min(jobs, len(items))
    logger = logging.getLogger(__name__)
    logger.debug(f"Dispatching {len(items)} items to {workers} worker processes")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))
