"""Ablation plans: sweep configurations through the CLI and collect one table.

A plan is a JSON file naming a split directory (as written by ``aecf
split``: ``train.csv`` and ``valid.csv``), a grid of model/optimizer
configurations, and the seeds to repeat each point with.  Every grid
point runs as a regular ``train`` CLI invocation; per-run metrics land in
``output_dir`` and are folded into one plot-ready long-format summary CSV
with header ``plan,config,seed,epoch,train_rmse,valid_rmse``.

A failing run is recorded as a single row with epoch -1 and empty metric
fields; the rest of the plan still executes.
"""

from __future__ import annotations

import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .activations import KINDS, Activation
from .arch import parse_architecture

SUMMARY_HEADER = ("plan", "config", "seed", "epoch", "train_rmse", "valid_rmse")


@dataclass(frozen=True)
class GridPoint:
    """One model/optimizer configuration of an ablation grid."""

    arch: str
    activation: str = "selu"
    dropout: float | None = None   # overrides the arch string's dp(p) when set
    lr: float = 0.001
    refeed: int = 0
    tied: bool = False

    def resolved_arch(self) -> str:
        spec = parse_architecture(self.arch, activation=Activation(self.activation),
                                  tied=self.tied)
        if self.dropout is not None:
            spec = spec.with_drop_prob(self.dropout)
        return spec.to_string()

    def label(self) -> str:
        parts = [f"arch={self.resolved_arch()}", f"act={self.activation}",
                 f"lr={self.lr:g}", f"refeed={self.refeed}"]
        if self.tied:
            parts.append("tied")
        return "|".join(parts)


@dataclass
class AblationPlan:
    name: str
    grid: list[GridPoint]
    dataset: Path                  # split directory holding train.csv / valid.csv
    seeds: list[int]
    output_dir: Path
    epochs: int = 30
    batch_size: int = 128
    momentum: float = 0.9

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ValueError("an ablation plan needs at least one seed")
        for point in self.grid:
            if point.activation not in KINDS:
                raise ValueError(f"unknown activation {point.activation!r}")
            point.resolved_arch()  # validates the architecture string


def load_plan(path: str | Path) -> AblationPlan:
    """Read a plan JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        grid = [GridPoint(**point) for point in doc.get("grid", [])]
        return AblationPlan(
            name=doc["name"],
            grid=grid,
            dataset=Path(doc["dataset"]),
            seeds=[int(s) for s in doc["seeds"]],
            output_dir=Path(doc["output_dir"]),
            epochs=int(doc.get("epochs", 30)),
            batch_size=int(doc.get("batch_size", 128)),
            momentum=float(doc.get("momentum", 0.9)),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad ablation plan {path}: {exc}") from None


def _train_argv(plan: AblationPlan, point: GridPoint, seed: int,
                metrics_path: Path) -> list[str]:
    argv = ["train",
            "--data", str(plan.dataset / "train.csv"),
            "--eval-data", str(plan.dataset / "valid.csv"),
            "--arch", point.resolved_arch(),
            "--activation", point.activation,
            "--lr", str(point.lr),
            "--momentum", str(plan.momentum),
            "--batch-size", str(plan.batch_size),
            "--epochs", str(plan.epochs),
            "--seed", str(seed),
            "--metrics-out", str(metrics_path)]
    if point.refeed:
        argv += ["--refeed", str(point.refeed)]
    if point.tied:
        argv.append("--tied")
    return argv


def _execute(argv: list[str]) -> int:
    from .cli import main

    return main(argv)


def run_ablation(plan: AblationPlan, *, workers: int = 1) -> Path:
    """Run every (grid point, seed) pair; returns the summary CSV path."""
    out = Path(plan.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs = [(idx, point, seed)
            for idx, point in enumerate(plan.grid) for seed in plan.seeds]
    metrics_paths = {(idx, seed): out / f"run_{idx:03d}_seed{seed}.csv"
                     for idx, point, seed in runs}
    argvs = [_train_argv(plan, point, seed, metrics_paths[(idx, seed)])
             for idx, point, seed in runs]

    if workers > 1 and len(runs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            statuses = list(pool.map(_execute, argvs))
    else:
        statuses = [_execute(argv) for argv in argvs]

    summary_path = out / f"{plan.name}_summary.csv"
    with open(summary_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        for (idx, point, seed), status in zip(runs, statuses):
            label = point.label()
            if status != 0:
                print(f"note: run {label} seed {seed} failed (exit {status})",
                      file=sys.stderr)
                writer.writerow([plan.name, label, seed, -1, "", ""])
                continue
            with open(metrics_paths[(idx, seed)], "r", encoding="utf-8") as mfh:
                for row in csv.DictReader(mfh):
                    writer.writerow([plan.name, label, seed, row["epoch"],
                                     row["train_rmse"], row["valid_rmse"]])
    return summary_path
