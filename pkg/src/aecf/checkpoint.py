"""Checkpoint files: one JSON document, tensors as base64 raw bytes.

A checkpoint is self-contained: architecture string, activation, tying,
the item vocabulary of the training split, and every independent
parameter tensor with an explicit little-endian dtype tag.  Loading
rebuilds the exact model; tensor bytes survive a round trip bit for bit.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .activations import Activation
from .arch import ArchitectureSpec, parse_architecture, spec_of
from .model import AutoencoderModel

FORMAT_MARKER = "aecf-checkpoint"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    """The file is not a readable checkpoint of a supported version."""


@dataclass
class CheckpointRecord:
    spec: ArchitectureSpec
    n_items: int
    dtype: np.dtype
    params: dict[str, np.ndarray]
    items: list[str] = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def _encode_array(arr: np.ndarray) -> dict:
    arr = np.ascontiguousarray(arr)
    le = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
    return {
        "shape": list(arr.shape),
        "dtype": le.dtype.str,
        "data": base64.b64encode(le.tobytes()).decode("ascii"),
    }


def _decode_array(obj: dict) -> np.ndarray:
    dtype = np.dtype(obj["dtype"])
    raw = base64.b64decode(obj["data"])
    arr = np.frombuffer(raw, dtype=dtype).reshape(obj["shape"])
    return arr.astype(dtype.newbyteorder("="), copy=True)


def save_checkpoint(model: AutoencoderModel, path: str | Path, *,
                    items: list[str] | None = None, meta: dict | None = None) -> None:
    """Write the model (and optional item vocabulary / metadata) to ``path``."""
    spec = spec_of(model)
    act = spec.activation
    doc = {
        "format": FORMAT_MARKER,
        "version": FORMAT_VERSION,
        "arch": spec.to_string(),
        "activation": act.kind,
        "lrelu_slope": act.lrelu_slope,
        "elu_alpha": act.elu_alpha,
        "tied": spec.tied,
        "n_items": model.n_items,
        "dtype": np.dtype(model.dtype).str,
        "items": list(items) if items is not None else [],
        "meta": meta or {},
        "params": {name: _encode_array(p) for name, p in model.parameters().items()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_checkpoint(path: str | Path) -> CheckpointRecord:
    """Read and validate a checkpoint file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_MARKER:
        raise CheckpointError(f"{path} is not a checkpoint file")
    if doc.get("version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {doc.get('version')!r}")

    activation = Activation(doc["activation"], lrelu_slope=doc.get("lrelu_slope", 0.01),
                            elu_alpha=doc.get("elu_alpha", 1.0))
    spec = parse_architecture(doc["arch"], activation=activation, tied=doc["tied"])
    params = {name: _decode_array(obj) for name, obj in doc["params"].items()}
    return CheckpointRecord(
        spec=spec,
        n_items=int(doc["n_items"]),
        dtype=np.dtype(doc["dtype"]),
        params=params,
        items=list(doc.get("items", [])),
        meta=doc.get("meta", {}),
    )


def restore_model(record: CheckpointRecord | str | Path) -> tuple[AutoencoderModel, CheckpointRecord]:
    """Rebuild the model a checkpoint describes and load its parameters."""
    if not isinstance(record, CheckpointRecord):
        record = load_checkpoint(record)
    model = record.spec.build(record.n_items, seed=0, dtype=record.dtype)
    try:
        model.load_parameters(record.params)
    except (KeyError, ValueError) as exc:
        raise CheckpointError(f"checkpoint parameters do not fit the model: {exc}") from None
    return model, record
