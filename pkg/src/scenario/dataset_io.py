"""
JSON Lines persistence for datasets.

One instance per line: ``{"step":0,"rates":[[...]],"positions":[[x,y,z],...]}``.
Floats are written with Python's shortest round-trip repr, so files are
byte-stable and reload bit-exactly.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List

import numpy as np

from src.errors import DataFormatError, ShapeMismatchError
from src.scenario.models import Dataset, Instance, as_rate_matrix
from src.utils import ensure_directory

logger = logging.getLogger(__name__)


def write_jsonl(path: str, records: Iterable[Dict[str, Any]]) -> int:
    """
    Write records as compact JSON Lines.

    Returns:
        Number of lines written
    """
    out = Path(path)
    ensure_directory(str(out.parent))
    count = 0
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(json.dumps(record, separators=(",", ":"), allow_nan=False))
            f.write("\n")
            count += 1
    return count


def iter_jsonl(path: str) -> Iterator[Dict[str, Any]]:
    """
    Yield one JSON object per non-empty line.

    Raises:
        DataFormatError: On unreadable files or malformed lines
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as e:
                    raise DataFormatError(f"{path}:{lineno}: invalid JSON: {e}") from e
                if not isinstance(record, dict):
                    raise DataFormatError(f"{path}:{lineno}: expected a JSON object")
                yield record
    except OSError as e:
        raise DataFormatError(f"cannot read {path}: {e}") from e


def instance_to_record(inst: Instance) -> Dict[str, Any]:
    return {
        "step": int(inst.step),
        "rates": inst.rates.tolist(),
        "positions": inst.positions.tolist(),
    }


def instance_from_record(record: Dict[str, Any]) -> Instance:
    """
    Parse the shared dataset fields of a JSONL record.

    Raises:
        DataFormatError: If a field is missing or malformed
    """
    try:
        step = record["step"]
        rates = as_rate_matrix(record["rates"])
        positions = np.asarray(record["positions"], dtype=np.float64)
    except KeyError as e:
        raise DataFormatError(f"record missing field {e}") from e
    except (TypeError, ValueError, ShapeMismatchError) as e:
        raise DataFormatError(f"malformed record at step {record.get('step')}: {e}") from e
    if not isinstance(step, int) or isinstance(step, bool):
        raise DataFormatError(f"step must be an integer, got {step!r}")
    if positions.shape != (rates.shape[0], 3):
        raise DataFormatError(f"step {step}: positions must be {rates.shape[0]} x 3")
    return Instance(step=step, rates=rates, positions=positions)


def write_dataset(dataset: Dataset, path: str) -> None:
    count = write_jsonl(path, (instance_to_record(inst) for inst in dataset.instances))
    logger.info(f"Wrote {count} instances to {path}")


def read_dataset(path: str) -> Dataset:
    """
    Load a dataset JSONL file.

    Raises:
        DataFormatError: On malformed content or step gaps
    """
    instances: List[Instance] = [instance_from_record(r) for r in iter_jsonl(path)]
    dataset = Dataset(instances=instances)
    try:
        dataset.validate()
    except ShapeMismatchError as e:
        raise DataFormatError(str(e)) from e
    logger.info(f"Read {len(dataset)} instances from {path}")
    return dataset
