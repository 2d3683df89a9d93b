"""Versioned on-disk container for trained models.

Layout (JSON, UTF-8, sorted keys):

    {
      "format": "wavecast-model",
      "version": 1,
      "spec": {...NetworkSpec fields...},
      "training": {...TrainingConfig fields...},
      "train_trace": [...], "validation_trace": [...], "best_epoch": int,
      "tensors": {name: {"shape": [...], "dtype": "<f8", "data": base64}},
      "extra": {}
    }

Tensor payloads are the raw little-endian float64 bytes in C (row-major)
order, base64-encoded, so save/load round-trips are bit-exact. Trace floats
rely on JSON's shortest round-trip representation, which is also exact for
binary64 values.
"""

from __future__ import annotations

import base64
import json
from dataclasses import asdict
from pathlib import Path
from typing import Any

import numpy as np

from .model import NetworkSpec
from .training import TrainedModel, TrainingConfig

__all__ = ["CheckpointError", "FORMAT_NAME", "FORMAT_VERSION", "save_checkpoint", "load_checkpoint"]

FORMAT_NAME = "wavecast-model"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    """The file is not a readable model checkpoint."""


def _encode_tensor(value: np.ndarray) -> dict[str, Any]:
    arr = np.ascontiguousarray(np.asarray(value, dtype="<f8"))
    return {
        "shape": list(arr.shape),
        "dtype": "<f8",
        "data": base64.b64encode(arr.tobytes(order="C")).decode("ascii"),
    }


def _decode_tensor(entry: dict[str, Any]) -> np.ndarray:
    if entry.get("dtype") != "<f8":
        raise CheckpointError(f"unsupported tensor dtype {entry.get('dtype')!r}")
    raw = base64.b64decode(entry["data"])
    arr = np.frombuffer(raw, dtype="<f8").astype(np.float64, copy=True)
    return arr.reshape(tuple(int(d) for d in entry["shape"]))


def save_checkpoint(model: TrainedModel, path: str | Path) -> None:
    """Write the model to `path`; loading it back reproduces every tensor bit."""
    document = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "spec": asdict(model.spec),
        "training": asdict(model.config),
        "train_trace": list(model.train_trace),
        "validation_trace": list(model.validation_trace),
        "best_epoch": model.best_epoch,
        "tensors": {name: _encode_tensor(value) for name, value in model.params.items()},
        "extra": {},
    }
    Path(path).write_text(
        json.dumps(document, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_checkpoint(path: str | Path) -> TrainedModel:
    """Read a checkpoint written by save_checkpoint."""
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if not isinstance(document, dict) or document.get("format") != FORMAT_NAME:
        raise CheckpointError(f"{path} is not a {FORMAT_NAME} checkpoint")
    if document.get("version") != FORMAT_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint version {document.get('version')!r}"
        )
    try:
        spec = NetworkSpec(**document["spec"])
        config = TrainingConfig(**document["training"])
        params = {
            name: _decode_tensor(entry) for name, entry in document["tensors"].items()
        }
        return TrainedModel(
            spec=spec,
            params=params,
            train_trace=tuple(float(v) for v in document["train_trace"]),
            validation_trace=tuple(float(v) for v in document["validation_trace"]),
            best_epoch=int(document["best_epoch"]),
            config=config,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f"malformed checkpoint {path}: {exc}") from exc
