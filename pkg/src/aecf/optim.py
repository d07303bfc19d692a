"""Stochastic gradient descent with classical momentum.

Parameters are updated in place so that transposed views (tied decoder
weights) stay coherent:

    v <- momentum * v - lr * g
    p <- p + v
"""

from __future__ import annotations

import numpy as np


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss or gradient.

    ``epoch`` and ``step`` are filled in by the training loop; ``history``
    carries the per-epoch metrics collected before the abort.
    """

    def __init__(self, message: str, *, epoch: int | None = None,
                 step: int | None = None, history: list | None = None):
        super().__init__(message)
        self.epoch = epoch
        self.step = step
        self.history = history


class SgdMomentum:
    """Classical (non-Nesterov) momentum over a named parameter dict.

    Velocity buffers mirror the parameter shapes and start at zero.
    """

    def __init__(self, params: dict[str, np.ndarray], learning_rate: float = 0.001,
                 momentum: float = 0.9):
        if learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {learning_rate}")
        if not 0 <= momentum < 1:
            raise ValueError(f"momentum must be in [0, 1), got {momentum}")
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.velocity = {name: np.zeros_like(p) for name, p in params.items()}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        if set(params) != set(self.velocity):
            raise ValueError("parameter names do not match optimizer state")
        if set(grads) != set(self.velocity):
            raise ValueError("gradient names do not match optimizer state")
        for name, p in params.items():
            g = grads[name]
            v = self.velocity[name]
            if g.shape != p.shape:
                raise ValueError(f"gradient shape {g.shape} != parameter shape {p.shape} for {name}")
            if not np.all(np.isfinite(g)):
                raise DivergenceError(f"non-finite gradient for parameter {name}")
            v *= self.momentum
            v -= self.learning_rate * g.astype(p.dtype, copy=False)
            p += v
