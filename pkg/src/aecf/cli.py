"""Command-line surface: split, train, evaluate, predict.

Conventions: exit status 0 iff the subcommand completed, diagnostics on
stderr, data on stdout or in files.  Paper-specified defaults (batch 128,
lr 0.001, momentum 0.9, selu) are the flag defaults.  Architecture
strings carry dims and dropout only; activation and tying are flags.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from pathlib import Path

import numpy as np

from .activations import KINDS, Activation
from .arch import ArchitectureError, parse_architecture
from .checkpoint import CheckpointError, restore_model
from .data import (DataFormatError, EvalSet, RatingDataset, RatingRecord,
                   SplitSpec, parse_ratings, partition_records, split_manifest,
                   write_ratings_csv)
from .optim import DivergenceError
from .training import TrainConfig, evaluate, fit, predict_rows


def _thread_cap(threads: int | None):
    if threads is None:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=threads)


def _load_records(path: str, fmt: str) -> list[RatingRecord]:
    if not Path(path).exists():
        raise FileNotFoundError(f"no such file: {path}")
    return parse_ratings(path, fmt=fmt)


def _keep_known(records: list[RatingRecord], ds: RatingDataset,
                what: str) -> list[RatingRecord]:
    """Drop records whose user or item the dataset cannot address."""
    kept = [r for r in records
            if r.user in ds.user_index and r.item in ds.item_index]
    dropped = len(records) - len(kept)
    if dropped:
        print(f"note: dropped {dropped} {what} records with unknown users/items",
              file=sys.stderr)
    return kept


# ----------------------------------------------------------------- subcommands


def _cmd_split(args: argparse.Namespace) -> int:
    records = _load_records(args.input, args.format)
    spec = SplitSpec(train_start=args.train_start, train_end=args.train_end,
                     test_start=args.test_start, test_end=args.test_end,
                     valid_fraction=args.valid_fraction, split_seed=args.seed)
    parts = partition_records(records, spec)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_ratings_csv(parts.train, out / "train.csv")
    write_ratings_csv(parts.test, out / "test.csv")
    write_ratings_csv(parts.validation, out / "valid.csv")
    with open(out / "split_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(split_manifest(spec, parts), fh, indent=2)
    print(f"wrote train/test/valid + manifest under {out}", file=sys.stderr)
    return 0


def _build_train_config(args: argparse.Namespace) -> TrainConfig:
    return TrainConfig(learning_rate=args.lr, momentum=args.momentum,
                       batch_size=args.batch_size, epochs=args.epochs,
                       refeed_count=args.refeed, seed=args.seed,
                       clip_predictions=args.clip_predictions)


def _cmd_train(args: argparse.Namespace) -> int:
    records = _load_records(args.data, args.format)
    train = RatingDataset.from_records(records)
    spec = parse_architecture(args.arch, activation=Activation(args.activation),
                              tied=args.tied)
    model = spec.build(train.n_items, seed=args.seed)

    valid = None
    if args.eval_data is not None:
        eval_records = _keep_known(_load_records(args.eval_data, args.format),
                                   train, "validation")
        if not eval_records:
            raise ValueError("no usable validation records after filtering")
        valid = EvalSet.from_records(eval_records, train)

    result = fit(model, train, _build_train_config(args), valid=valid,
                 metrics_out=args.metrics_out, checkpoint_dir=args.checkpoint_dir)
    final = result.history[-1]
    print(f"final_train_rmse={final.train_rmse:.6f}")
    if result.best_valid_rmse is not None:
        print(f"best_valid_rmse={result.best_valid_rmse:.6f} "
              f"(epoch {result.best_epoch})")
    return 0


def _dataset_for_checkpoint(path: str, fmt: str, items: list[str]) -> RatingDataset:
    if not items:
        raise CheckpointError("checkpoint has no item vocabulary; cannot index data")
    records = _load_records(path, fmt)
    known = [r for r in records if r.item in set(items)]
    dropped = len(records) - len(known)
    if dropped:
        print(f"note: dropped {dropped} records with items outside the "
              f"checkpoint vocabulary", file=sys.stderr)
    if not known:
        raise ValueError(f"no records in {path} overlap the checkpoint vocabulary")
    return RatingDataset.from_records(known, item_tokens=items)


def _cmd_evaluate(args: argparse.Namespace) -> int:
    model, record = restore_model(args.checkpoint)
    vectors = _dataset_for_checkpoint(args.data, args.format, record.items)
    if args.eval_data is None:
        # Self-reconstruction: score the same observed entries that are fed.
        eval_set = EvalSet(
            users=np.repeat(np.arange(vectors.n_users), np.diff(vectors.indptr)),
            items=vectors.item_ids,
            ratings=vectors.ratings)
    else:
        eval_records = _keep_known(_load_records(args.eval_data, args.format),
                                   vectors, "eval")
        if not eval_records:
            raise ValueError("no usable eval records after filtering")
        eval_set = EvalSet.from_records(eval_records, vectors)
    rmse = evaluate(model, vectors, eval_set, clip=args.clip_predictions)
    print(f"rmse={rmse:.6f}")
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    model, record = restore_model(args.checkpoint)
    vectors = _dataset_for_checkpoint(args.data, args.format, record.items)
    tokens = [t for t in (tok.strip() for tok in args.users.split(",")) if t]
    if not tokens:
        raise ValueError("--users must list at least one user token")
    missing = [t for t in tokens if t not in vectors.user_index]
    if missing:
        raise ValueError(f"users not present in --data: {', '.join(missing)}")
    ids = np.array([vectors.user_index[t] for t in tokens], dtype=np.int64)
    rows = predict_rows(model, vectors, ids, clip=args.clip_predictions)

    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        out.write("user,item,score\n")
        for tok, row in zip(tokens, rows):
            items = np.argsort(-row)[:args.top_k] if args.top_k else range(len(row))
            for i in items:
                out.write(f"{tok},{record.items[i]},{row[i]:.6g}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aecf",
        description="Deep autoencoder collaborative filtering on rating logs.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="cap BLAS worker threads (determinism needs --threads 1)")
    common.add_argument("--format", choices=("csv", "tsv"), default="csv",
                        help="rating log delimiter (default csv)")

    p = sub.add_parser("split", parents=[common],
                       help="time-split a rating log into train/test/valid + manifest")
    p.add_argument("--input", required=True, help="rating log to split")
    p.add_argument("--train-start", default=None, help="inclusive day or epoch second")
    p.add_argument("--train-end", required=True, help="inclusive day or epoch second")
    p.add_argument("--test-start", required=True, help="inclusive day or epoch second")
    p.add_argument("--test-end", default=None, help="inclusive day or epoch second")
    p.add_argument("--valid-fraction", type=float, default=0.5,
                   help="chance a testing-window rating lands in valid (default 0.5)")
    p.add_argument("--seed", type=int, default=0, help="test/valid coin-flip seed")
    p.add_argument("--output-dir", default=".", help="where to write the subsets")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("train", parents=[common],
                       help="fit a model and write metrics/checkpoints")
    p.add_argument("--data", required=True, help="training ratings CSV")
    p.add_argument("--eval-data", default=None,
                   help="validation ratings CSV (enables best-checkpoint tracking)")
    p.add_argument("--arch", required=True,
                   help="architecture string, e.g. \"n,512,512,1024,dp(0.8),512,512,n\"")
    p.add_argument("--activation", choices=KINDS, default="selu")
    p.add_argument("--tied", action="store_true",
                   help="share decoder weights with the mirrored encoder layers")
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--refeed", type=int, nargs="?", const=1, default=0,
                   metavar="N", help="dense re-feed passes per iteration "
                   "(bare flag means 1, default 0)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoint-dir", default=None)
    p.add_argument("--metrics-out", default=None, help="per-epoch metrics CSV path")
    p.add_argument("--clip-predictions", action="store_true",
                   help="clip predictions to [1, 5] when evaluating")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", parents=[common],
                       help="print RMSE of a checkpoint on a rating log")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True,
                   help="ratings CSV providing the input vectors (and, without "
                        "--eval-data, the scored targets)")
    p.add_argument("--eval-data", default=None,
                   help="held-out ratings CSV to score instead of --data itself")
    p.add_argument("--clip-predictions", action="store_true")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("predict", parents=[common],
                       help="emit user,item,score predictions for listed users")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True, help="ratings CSV providing input vectors")
    p.add_argument("--users", required=True, help="comma-separated user tokens")
    p.add_argument("--top-k", type=int, default=None,
                   help="emit only the K highest-scored items per user")
    p.add_argument("--clip-predictions", action="store_true")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.set_defaults(func=_cmd_predict)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _thread_cap(args.threads):
            return args.func(args)
    except (DataFormatError, ArchitectureError, CheckpointError, DivergenceError,
            OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
