import json

import numpy as np
import pytest

from aecf import (Activation, CheckpointError, load_checkpoint, parse_architecture,
                  restore_model, save_checkpoint)
from aecf.model import EVAL
from aecf.losses import Batch


def build(arch="n,16,8,dp(0.5),16,n", kind="selu", tied=False, n=24, dtype=np.float32):
    spec = parse_architecture(arch, activation=Activation(kind), tied=tied)
    return spec.build(n, seed=3, dtype=dtype)


def test_round_trip_is_bit_exact(tmp_path):
    model = build()
    path = tmp_path / "m.ckpt"
    save_checkpoint(model, path, items=[f"m{i}" for i in range(24)],
                    meta={"epoch": 7, "valid_rmse": 1.25})
    record = load_checkpoint(path)
    for name, original in model.parameters().items():
        loaded = record.params[name]
        assert loaded.dtype == original.dtype
        assert np.array_equal(loaded, original)  # exact, not approx
    assert record.n_items == 24
    assert record.items[3] == "m3"
    assert record.meta["epoch"] == 7
    assert record.spec.drop_prob == 0.5
    assert record.spec.activation.kind == "selu"


def test_restored_model_predicts_identically(tmp_path):
    model = build(kind="elu")
    rng = np.random.default_rng(0)
    batch = Batch.dense(rng.uniform(1, 5, (5, 24)).astype(np.float32))
    want, _ = model.forward(batch, mode=EVAL)
    save_checkpoint(model, tmp_path / "m.ckpt")
    restored, record = restore_model(tmp_path / "m.ckpt")
    got, _ = restored.forward(batch, mode=EVAL)
    assert np.array_equal(want, got)
    assert record.items == []


def test_tied_model_round_trip_preserves_sharing(tmp_path):
    model = build(arch="n,16,8,16,n", tied=True)
    save_checkpoint(model, tmp_path / "t.ckpt")
    restored, record = restore_model(tmp_path / "t.ckpt")
    assert restored.tied
    assert restored.decoder[0].weight.base is restored.encoder[1].weight
    assert restored.num_parameters() == model.num_parameters()
    assert record.spec.tied


def test_float64_checkpoint_keeps_dtype(tmp_path):
    model = build(dtype=np.float64)
    save_checkpoint(model, tmp_path / "d.ckpt")
    restored, _ = restore_model(tmp_path / "d.ckpt")
    assert restored.dtype == np.float64
    for name, p in model.parameters().items():
        assert np.array_equal(restored.parameters()[name], p)


def test_rejects_non_checkpoint_and_wrong_version(tmp_path):
    bad = tmp_path / "bad.ckpt"
    bad.write_text("{\"format\": \"something-else\"}")
    with pytest.raises(CheckpointError, match="not a checkpoint"):
        load_checkpoint(bad)
    bad.write_text("not json at all")
    with pytest.raises(CheckpointError, match="cannot read"):
        load_checkpoint(bad)
    with pytest.raises(CheckpointError, match="cannot read"):
        load_checkpoint(tmp_path / "missing.ckpt")

    model = build()
    good = tmp_path / "good.ckpt"
    save_checkpoint(model, good)
    doc = json.loads(good.read_text())
    doc["version"] = 99
    good.write_text(json.dumps(doc))
    with pytest.raises(CheckpointError, match="version"):
        load_checkpoint(good)


def test_rejects_tampered_parameter_shapes(tmp_path):
    model = build()
    path = tmp_path / "m.ckpt"
    save_checkpoint(model, path)
    doc = json.loads(path.read_text())
    doc["params"]["enc0.bias"]["shape"] = [2]
    path.write_text(json.dumps(doc))
    with pytest.raises((CheckpointError, ValueError)):
        restore_model(path)
