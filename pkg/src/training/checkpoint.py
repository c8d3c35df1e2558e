"""
Checkpoint persistence.

A checkpoint is one JSON object::

    {"format_version": 1, "kind": "topdown", "spec": {...}, "standardizer": {"mu", "sigma"},
     "layers": [{"w": [row-major floats], "b": [...]}, ...],
     "meta": {"best_epoch", "best_val_loss", "config_digest"}}

``spec`` holds the NetworkSpec fields plus the training shape (n_rx, n_tx) and
the capacity limit. Floats use the shortest round-trip repr, so weights
reload bit-exactly.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict

import numpy as np

from src.errors import DataFormatError, SpikeAssocError
from src.models import BottomUpModel, Model, ModelKind, Standardizer, TopDownModel
from src.snn import LayerParams, NetworkSpec, Weights
from src.utils import ensure_directory

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class CheckpointMeta:
    best_epoch: int
    best_val_loss: float
    config_digest: str


@dataclass
class Checkpoint:
    """
    A trained model together with the shape it was trained on.

    Attributes:
        model: TopDownModel or BottomUpModel
        n_rx: N of the training data
        n_tx: M of the training data
        limit: Capacity L used by the loss
        meta: Best-epoch bookkeeping
    """
    model: Model
    n_rx: int
    n_tx: int
    limit: int
    meta: CheckpointMeta

    @property
    def kind(self) -> ModelKind:
        return self.model.kind


def checkpoint_to_dict(ckpt: Checkpoint) -> Dict[str, Any]:
    spec = ckpt.model.spec.to_dict()
    spec.update({"n_rx": ckpt.n_rx, "n_tx": ckpt.n_tx, "limit": ckpt.limit})
    return {
        "format_version": FORMAT_VERSION,
        "kind": ckpt.kind.value,
        "spec": spec,
        "standardizer": {"mu": ckpt.model.standardizer.mu, "sigma": ckpt.model.standardizer.sigma},
        "layers": [
            {"w": [float(v) for v in layer.w.ravel()], "b": [float(v) for v in layer.b]}
            for layer in ckpt.model.weights.layers
        ],
        "meta": {
            "best_epoch": ckpt.meta.best_epoch,
            "best_val_loss": ckpt.meta.best_val_loss,
            "config_digest": ckpt.meta.config_digest,
        },
    }


def _weights_from_dict(spec: NetworkSpec, layers: Any) -> Weights:
    if not isinstance(layers, list) or len(layers) != len(spec.layer_sizes) - 1:
        raise DataFormatError(f"checkpoint must hold {len(spec.layer_sizes) - 1} layers")
    parsed = []
    for k, layer in enumerate(layers):
        fan_in, fan_out = spec.layer_sizes[k], spec.layer_sizes[k + 1]
        w = np.asarray(layer["w"], dtype=np.float64)
        b = np.asarray(layer["b"], dtype=np.float64)
        if w.shape != (fan_out * fan_in,) or b.shape != (fan_out,):
            raise DataFormatError(
                f"layer {k}: expected {fan_out * fan_in} weights and {fan_out} biases, "
                f"got {w.size} and {b.size}"
            )
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise DataFormatError(f"layer {k}: non-finite parameters")
        parsed.append(LayerParams(w=w.reshape(fan_out, fan_in), b=b))
    return Weights(parsed)


def checkpoint_from_dict(data: Dict[str, Any]) -> Checkpoint:
    """
    Rebuild a checkpoint from its JSON object.

    Raises:
        DataFormatError: On version mismatch or malformed content
    """
    if not isinstance(data, dict):
        raise DataFormatError("checkpoint must be a JSON object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise DataFormatError(f"unsupported checkpoint format_version {version!r} (expected {FORMAT_VERSION})")

    try:
        kind = ModelKind(data["kind"])
        spec_data = data["spec"]
        spec = NetworkSpec.from_dict(spec_data)
        n_rx, n_tx, limit = int(spec_data["n_rx"]), int(spec_data["n_tx"]), int(spec_data["limit"])
        standardizer = Standardizer(mu=float(data["standardizer"]["mu"]),
                                    sigma=float(data["standardizer"]["sigma"]))
        weights = _weights_from_dict(spec, data["layers"])
        meta = data["meta"]
        ckpt_meta = CheckpointMeta(
            best_epoch=int(meta["best_epoch"]),
            best_val_loss=float(meta["best_val_loss"]),
            config_digest=str(meta["config_digest"]),
        )
        if kind == ModelKind.TOPDOWN:
            model: Model = TopDownModel(spec=spec, weights=weights, standardizer=standardizer,
                                        n_rx=n_rx, n_tx=n_tx, limit=limit)
        else:
            model = BottomUpModel(spec=spec, weights=weights, standardizer=standardizer, n_tx=n_tx)
    except DataFormatError:
        raise
    except KeyError as e:
        raise DataFormatError(f"checkpoint missing field {e}") from e
    except (TypeError, ValueError, SpikeAssocError) as e:
        raise DataFormatError(f"malformed checkpoint: {e}") from e

    return Checkpoint(model=model, n_rx=n_rx, n_tx=n_tx, limit=limit, meta=ckpt_meta)


def save_checkpoint(ckpt: Checkpoint, path: str) -> None:
    out = Path(path)
    ensure_directory(str(out.parent))
    text = json.dumps(checkpoint_to_dict(ckpt), separators=(",", ":"), allow_nan=False)
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
        f.write("\n")
    logger.info(f"Saved {ckpt.kind.value} checkpoint (best epoch {ckpt.meta.best_epoch}) to {out}")


def load_checkpoint(path: str) -> Checkpoint:
    """
    Load a checkpoint file.

    Raises:
        DataFormatError: If the file is unreadable, truncated, malformed or of another version
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise DataFormatError(f"cannot read checkpoint {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise DataFormatError(f"{path}: checkpoint is not valid JSON: {e}") from e
    ckpt = checkpoint_from_dict(data)
    logger.info(f"Loaded {ckpt.kind.value} checkpoint from {path}")
    return ckpt
