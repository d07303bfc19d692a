"""Deep autoencoder collaborative filtering.

Sparse user rating rows go through a symmetric fully connected
encoder/decoder; training minimizes masked mean squared error over
observed entries only, optionally followed by dense re-feeding steps that
train the network on its own detached predictions.  The package covers
the full loop: time-based splitting of rating logs, model construction
from architecture strings, SGD-with-momentum training with divergence
detection, checkpointing, evaluation, and ablation sweeps.
"""

from .ablation import AblationPlan, GridPoint, load_plan, run_ablation
from .activations import Activation, KINDS, RANGE_LIMITED, apply, derivative
from .arch import ArchitectureError, ArchitectureSpec, parse_architecture, spec_of
from .checkpoint import (CheckpointError, CheckpointRecord, load_checkpoint,
                         restore_model, save_checkpoint)
from .data import (DataFormatError, EvalSet, RatingDataset, RatingRecord,
                   SplitSpec, SplitRecords, batch_iterator, dedup_latest,
                   parse_ratings, partition_records, split_manifest, time_split,
                   write_ratings_csv)
from .losses import Batch, masked_mse, masked_mse_gradient, rmse_from_mmse
from .model import AutoencoderModel, EVAL, TRAIN, build_model, init_xavier
from .optim import DivergenceError, SgdMomentum
from .synthetic import (SyntheticConfig, default_split, desk_corpus,
                        generate_ratings, low_rank_matrix)
from .training import (EpochStats, FitResult, StepStats, TrainConfig, evaluate,
                       fit, predict_rows, train_step)

__version__ = "0.1.0"

__all__ = [
    "AblationPlan", "GridPoint", "load_plan", "run_ablation",
    "Activation", "KINDS", "RANGE_LIMITED", "apply", "derivative",
    "ArchitectureError", "ArchitectureSpec", "parse_architecture", "spec_of",
    "CheckpointError", "CheckpointRecord", "load_checkpoint", "restore_model",
    "save_checkpoint",
    "Batch", "DataFormatError", "EvalSet", "RatingDataset", "RatingRecord",
    "SplitSpec", "SplitRecords", "batch_iterator", "dedup_latest", "parse_ratings",
    "partition_records", "split_manifest", "time_split", "write_ratings_csv",
    "masked_mse", "masked_mse_gradient", "rmse_from_mmse",
    "AutoencoderModel", "EVAL", "TRAIN", "build_model", "init_xavier",
    "DivergenceError", "SgdMomentum",
    "SyntheticConfig", "default_split", "desk_corpus", "generate_ratings",
    "low_rank_matrix",
    "EpochStats", "FitResult", "StepStats", "TrainConfig", "evaluate", "fit",
    "predict_rows", "train_step",
    "__version__",
]
