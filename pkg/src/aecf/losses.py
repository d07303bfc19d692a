"""Masked mean squared error and its gradient.

Rating rows are mostly unobserved, so reconstruction error is measured
only where the 0/1 mask is set:

    mmse = sum_ij m_ij * (r_ij - y_ij)^2 / sum_ij m_ij

The sum runs over the whole batch (batch-global normalization), which
makes ``rmse = sqrt(mmse)`` hold exactly over any evaluation set.
Accumulation is done in float64 regardless of the input dtype.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class Batch:
    """A dense block of user rating rows plus its 0/1 observation mask.

    ``ratings`` holds 0 where unrated and the rating value where rated;
    ``mask`` is 1 exactly on the rated entries.  Batches densified from a
    sparse store have at least one rated entry per row; re-fed dense
    batches carry an all-ones mask.  ``users`` optionally records which
    dataset user each row came from.
    """

    ratings: np.ndarray
    mask: np.ndarray
    users: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.ratings.shape != self.mask.shape:
            raise ValueError(
                f"ratings shape {self.ratings.shape} != mask shape {self.mask.shape}"
            )

    @classmethod
    def dense(cls, matrix: np.ndarray) -> "Batch":
        """Wrap a fully observed matrix (all-ones mask)."""
        return cls(ratings=matrix, mask=np.ones_like(matrix))

    @property
    def n_rows(self) -> int:
        return self.ratings.shape[0]


def _check_shapes(predicted: np.ndarray, target: np.ndarray, mask: np.ndarray) -> None:
    if predicted.shape != target.shape or predicted.shape != mask.shape:
        raise ValueError(
            f"shape mismatch: predicted {predicted.shape}, target {target.shape}, "
            f"mask {mask.shape}"
        )


def masked_mse(predicted: np.ndarray, target: np.ndarray, mask: np.ndarray) -> float:
    """Mean squared error over the masked-in entries of a batch.

    Raises ValueError on shape mismatch or an all-zero mask (the loss is
    undefined with no observed entries).
    """
    _check_shapes(predicted, target, mask)
    count = float(mask.sum(dtype=np.float64))
    if count == 0:
        raise ValueError("masked_mse: mask has no nonzero entries")
    diff = predicted - target
    sse = float((mask * diff * diff).sum(dtype=np.float64))
    return sse / count


def masked_mse_gradient(predicted: np.ndarray, target: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Gradient of :func:`masked_mse` with respect to ``predicted``.

    Equals ``2 * m_ij * (y_ij - r_ij) / sum(m)`` elementwise; exactly zero
    wherever the mask is zero.
    """
    _check_shapes(predicted, target, mask)
    count = mask.sum(dtype=np.float64)
    if count == 0:
        raise ValueError("masked_mse_gradient: mask has no nonzero entries")
    scale = predicted.dtype.type(2.0 / count) if predicted.dtype.kind == "f" else 2.0 / count
    return scale * mask * (predicted - target)


def rmse_from_mmse(mmse: float) -> float:
    """RMSE of a masked-MSE value; rejects negative input."""
    if mmse < 0:
        raise ValueError(f"mmse must be >= 0, got {mmse}")
    return math.sqrt(mmse)
