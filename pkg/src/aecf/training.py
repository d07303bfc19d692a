"""Training loop: masked-loss steps, dense re-feeding, evaluation, divergence watch.

One iteration processes a mini-batch of user rows:

1. forward the sparse rows and take the masked loss against them,
2. update the weights,
3. treat the (detached) prediction ``f(x)`` as a new dense example: feed
   it back as both input and target with an all-ones mask, and update
   again.  Step 3 runs ``refeed_count`` times per iteration, always
   against the same detached prediction from step 1.

Training diverging is an error, not a silent bad result: a non-finite
loss or gradient raises immediately, and a sustained blow-up of the
epoch training loss (beyond 10x the first epoch for 5 epochs straight)
raises as well.  The partial history rides on the exception.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

import numpy as np

from .data import EvalSet, RatingDataset, batch_iterator
from .losses import Batch, masked_mse, masked_mse_gradient, rmse_from_mmse
from .model import EVAL, TRAIN, AutoencoderModel
from .optim import DivergenceError, SgdMomentum

DIVERGENCE_FACTOR = 10.0
DIVERGENCE_PATIENCE = 5

METRICS_HEADER = ("epoch", "train_mmse", "train_rmse", "refeed_mmse",
                  "valid_rmse", "wall_ms")


@dataclass
class TrainConfig:
    learning_rate: float = 0.001
    momentum: float = 0.9
    batch_size: int = 128
    epochs: int = 50
    refeed_count: int = 0
    refeed_dropout: bool = True    # keep the coding-layer dropout on during re-feed passes
    clip_predictions: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.refeed_count < 0:
            raise ValueError(f"refeed_count must be >= 0, got {self.refeed_count}")


@dataclass
class StepStats:
    """Per-iteration record; exposes the re-feed buffers for instrumentation."""

    mmse: float
    mask_count: float
    updates: int
    refeed_mmse: float | None = None
    refeed_target: np.ndarray | None = None


@dataclass
class EpochStats:
    epoch: int
    train_mmse: float
    train_rmse: float
    refeed_mmse: float | None
    valid_rmse: float | None
    wall_ms: float


@dataclass
class FitResult:
    history: list[EpochStats] = field(default_factory=list)
    best_epoch: int | None = None
    best_valid_rmse: float | None = None
    best_params: dict[str, np.ndarray] | None = None


def train_step(model: AutoencoderModel, batch: Batch, optimizer: SgdMomentum,
               rng: np.random.Generator, *, refeed_count: int = 0,
               refeed_dropout: bool = True) -> StepStats:
    """One sparse update plus ``refeed_count`` dense re-feed updates."""
    output, tape = model.forward(batch, mode=TRAIN, rng=rng)
    mmse = masked_mse(output, batch.ratings, batch.mask)
    if not np.isfinite(mmse):
        raise DivergenceError(f"non-finite training loss {mmse}")
    grads = model.backward(tape, masked_mse_gradient(output, batch.ratings, batch.mask))
    optimizer.step(model.parameters(), grads)
    stats = StepStats(mmse=mmse, mask_count=float(batch.mask.sum()), updates=1)
    if refeed_count == 0:
        return stats

    # Detached snapshot: later updates must not touch the re-feed target.
    target = output.copy()
    dense = Batch.dense(target)
    losses = []
    for _ in range(refeed_count):
        refed, tape = model.forward(dense, mode=TRAIN, rng=rng,
                                    use_dropout=refeed_dropout and model.drop_prob > 0)
        loss = masked_mse(refed, dense.ratings, dense.mask)
        if not np.isfinite(loss):
            raise DivergenceError(f"non-finite re-feed loss {loss}")
        losses.append(loss)
        grads = model.backward(tape, masked_mse_gradient(refed, dense.ratings, dense.mask))
        optimizer.step(model.parameters(), grads)
        stats.updates += 1
    stats.refeed_mmse = float(np.mean(losses))
    stats.refeed_target = target
    return stats


def predict_rows(model: AutoencoderModel, train: RatingDataset, users: np.ndarray,
                 *, clip: bool = False, batch_size: int = 512) -> np.ndarray:
    """Dense predictions for the given train-set user ids, in eval mode."""
    users = np.asarray(users, dtype=np.int64)
    rows = np.empty((len(users), model.n_items), dtype=model.dtype)
    for lo in range(0, len(users), batch_size):
        chunk = users[lo:lo + batch_size]
        out, _ = model.forward(train.densify(chunk), mode=EVAL)
        rows[lo:lo + len(chunk)] = out
    if clip:
        np.clip(rows, 1.0, 5.0, out=rows)
    return rows


def evaluate(model: AutoencoderModel, train: RatingDataset, eval_set: EvalSet,
             *, clip: bool = False, batch_size: int = 512) -> float:
    """RMSE on held-out triples, feeding each user's training-window vector."""
    if len(eval_set) == 0:
        raise ValueError("cannot evaluate on an empty eval set")
    users, inverse = np.unique(eval_set.users, return_inverse=True)
    sq_sum = 0.0
    for lo in range(0, len(users), batch_size):
        chunk = users[lo:lo + batch_size]
        preds = predict_rows(model, train, chunk, clip=clip, batch_size=batch_size)
        sel = (inverse >= lo) & (inverse < lo + len(chunk))
        got = preds[inverse[sel] - lo, eval_set.items[sel]].astype(np.float64)
        sq_sum += float(((eval_set.ratings[sel] - got) ** 2).sum())
    return float(np.sqrt(sq_sum / len(eval_set)))


def _write_metrics_row(writer, epoch_stats: EpochStats) -> None:
    def fmt(v):
        return "" if v is None else f"{v:.10g}"

    writer.writerow([epoch_stats.epoch, fmt(epoch_stats.train_mmse),
                     fmt(epoch_stats.train_rmse), fmt(epoch_stats.refeed_mmse),
                     fmt(epoch_stats.valid_rmse), f"{epoch_stats.wall_ms:.3f}"])


def fit(model: AutoencoderModel, train: RatingDataset, config: TrainConfig, *,
        valid: EvalSet | None = None, metrics_out: str | Path | IO[str] | None = None,
        checkpoint_dir: str | Path | None = None) -> FitResult:
    """Train for ``config.epochs`` epochs; returns per-epoch history.

    With a validation set, the best (lowest validation RMSE) parameters
    are kept in the result and, when ``checkpoint_dir`` is given, written
    to ``best.ckpt``; the final state goes to ``last.ckpt``.  Runs are
    deterministic in ``config.seed``: epoch shuffles and dropout draws
    derive from one seed sequence, so extending ``epochs`` replays the
    same prefix.
    """
    from . import checkpoint as ckpt  # local import, checkpoint pulls in arch

    root = np.random.SeedSequence(config.seed)
    dropout_rng = np.random.default_rng(root.spawn(1)[0])
    optimizer = SgdMomentum(model.parameters(), learning_rate=config.learning_rate,
                            momentum=config.momentum)
    result = FitResult()
    ckpt_dir = Path(checkpoint_dir) if checkpoint_dir is not None else None
    if ckpt_dir is not None:
        ckpt_dir.mkdir(parents=True, exist_ok=True)

    own_handle = metrics_out is not None and isinstance(metrics_out, (str, Path))
    handle = open(metrics_out, "w", encoding="utf-8", newline="") if own_handle else metrics_out
    writer = None
    if handle is not None:
        writer = csv.writer(handle)
        writer.writerow(METRICS_HEADER)

    initial_mmse = None
    blowups = 0
    try:
        for epoch in range(1, config.epochs + 1):
            tic = time.perf_counter()
            epoch_seed = int(root.spawn(1)[0].generate_state(1)[0])
            sq, count = 0.0, 0.0
            refeed_sq, refeed_batches = 0.0, 0
            for batch in batch_iterator(train, config.batch_size, epoch_seed,
                                        dtype=model.dtype):
                try:
                    stats = train_step(model, batch, optimizer, dropout_rng,
                                       refeed_count=config.refeed_count,
                                       refeed_dropout=config.refeed_dropout)
                except DivergenceError as err:
                    err.history = result.history
                    err.epoch = epoch
                    raise
                sq += stats.mmse * stats.mask_count
                count += stats.mask_count
                if stats.refeed_mmse is not None:
                    refeed_sq += stats.refeed_mmse
                    refeed_batches += 1

            train_mmse = sq / count
            valid_rmse = (evaluate(model, train, valid, clip=config.clip_predictions)
                          if valid is not None else None)
            epoch_stats = EpochStats(
                epoch=epoch,
                train_mmse=train_mmse,
                train_rmse=rmse_from_mmse(train_mmse),
                refeed_mmse=refeed_sq / refeed_batches if refeed_batches else None,
                valid_rmse=valid_rmse,
                wall_ms=(time.perf_counter() - tic) * 1000.0,
            )
            result.history.append(epoch_stats)
            if writer is not None:
                _write_metrics_row(writer, epoch_stats)
                handle.flush()

            if valid_rmse is not None and (result.best_valid_rmse is None
                                           or valid_rmse < result.best_valid_rmse):
                result.best_valid_rmse = valid_rmse
                result.best_epoch = epoch
                result.best_params = {k: v.copy() for k, v in model.parameters().items()}
                if ckpt_dir is not None:
                    ckpt.save_checkpoint(model, ckpt_dir / "best.ckpt",
                                         items=train.item_tokens,
                                         meta={"epoch": epoch, "valid_rmse": valid_rmse})

            if initial_mmse is None:
                initial_mmse = train_mmse
            blowups = blowups + 1 if train_mmse > DIVERGENCE_FACTOR * initial_mmse else 0
            if blowups >= DIVERGENCE_PATIENCE:
                raise DivergenceError(
                    f"training loss stuck above {DIVERGENCE_FACTOR:g}x its initial value "
                    f"for {DIVERGENCE_PATIENCE} consecutive epochs",
                    epoch=epoch, history=result.history)
    finally:
        if own_handle and handle is not None:
            handle.close()

    if ckpt_dir is not None:
        ckpt.save_checkpoint(model, ckpt_dir / "last.ckpt", items=train.item_tokens,
                             meta={"epoch": config.epochs})
    return result
