"""Elementwise nonlinearities and their derivatives.

Eight kinds are supported: ``sigmoid``, ``tanh``, ``relu``, ``relu6``,
``elu``, ``lrelu``, ``selu`` and ``linear``.  They split into two families
that behave very differently in deep rating autoencoders: functions with a
non-zero negative part and an unbounded positive part (elu, selu, lrelu)
versus functions that are bounded above and/or zero below (sigmoid, tanh,
relu, relu6).

All functions are total on finite inputs and vectorize elementwise over
numpy arrays.  Derivatives at non-differentiable points (x=0 for the
relu family, x in {0, 6} for relu6) use the right-hand derivative so that
backpropagation is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Fixed constants of the self-normalizing selu unit; not user-tunable.
SELU_LAMBDA = 1.0507009873554805
SELU_ALPHA = 1.6732632423543772

KINDS = ("sigmoid", "tanh", "relu", "relu6", "elu", "lrelu", "selu", "linear")

# Activations whose range cannot cover the 1-5 rating scale.  Models built
# with these keep their final decoder layer linear.
RANGE_LIMITED = ("sigmoid", "tanh")


@dataclass(frozen=True)
class Activation:
    """One activation kind plus its optional shape parameters.

    ``lrelu_slope`` is the negative-side slope of lrelu and ``elu_alpha``
    the negative-saturation magnitude of elu; both must be positive and
    are ignored by every other kind.  The two selu constants are fixed
    module-level values.
    """

    kind: str
    lrelu_slope: float = 0.01
    elu_alpha: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown activation kind {self.kind!r}; expected one of {KINDS}")
        if self.lrelu_slope <= 0:
            raise ValueError(f"lrelu_slope must be > 0, got {self.lrelu_slope}")
        if self.elu_alpha <= 0:
            raise ValueError(f"elu_alpha must be > 0, got {self.elu_alpha}")

    def __call__(self, x):
        return apply(self, x)


def _as_float_array(x) -> np.ndarray:
    x = np.asarray(x)
    if not np.issubdtype(x.dtype, np.floating):
        x = x.astype(np.float64)
    return x


def apply(act: Activation, x):
    """Evaluate ``act`` elementwise on ``x`` (scalar or ndarray)."""
    x = _as_float_array(x)
    kind = act.kind
    if kind == "linear":
        return x
    if kind == "relu":
        return np.maximum(x, 0)
    if kind == "relu6":
        return np.clip(x, 0, 6)
    if kind == "tanh":
        return np.tanh(x)
    if kind == "sigmoid":
        # Evaluate exp only on non-positive arguments to avoid overflow.
        e = np.exp(-np.abs(x))
        return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    if kind == "lrelu":
        return np.where(x >= 0, x, act.lrelu_slope * x)
    if kind == "elu":
        return np.where(x >= 0, x, act.elu_alpha * np.expm1(np.minimum(x, 0)))
    if kind == "selu":
        return SELU_LAMBDA * np.where(x >= 0, x, SELU_ALPHA * np.expm1(np.minimum(x, 0)))
    raise AssertionError(kind)


def derivative(act: Activation, x):
    """Evaluate d(act)/dx elementwise, using right-hand derivatives at kinks."""
    x = _as_float_array(x)
    kind = act.kind
    if kind == "linear":
        return np.ones_like(x)
    if kind == "relu":
        return (x >= 0).astype(x.dtype)
    if kind == "relu6":
        return ((x >= 0) & (x < 6)).astype(x.dtype)
    if kind == "tanh":
        t = np.tanh(x)
        return 1.0 - t * t
    if kind == "sigmoid":
        s = apply(act, x)
        return s * (1.0 - s)
    if kind == "lrelu":
        return np.where(x >= 0, x.dtype.type(1.0), x.dtype.type(act.lrelu_slope))
    if kind == "elu":
        return np.where(x >= 0, x.dtype.type(1.0), act.elu_alpha * np.exp(np.minimum(x, 0)))
    if kind == "selu":
        return SELU_LAMBDA * np.where(
            x >= 0, x.dtype.type(1.0), SELU_ALPHA * np.exp(np.minimum(x, 0))
        )
    raise AssertionError(kind)
