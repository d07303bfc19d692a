"""Architecture strings: the compact "n,512,512,1024,dp(0.8),512,512,n" form.

The leading and trailing ``n`` stand for the item count and are resolved
when a model is built against a dataset, so one string works across
datasets.  Integer tokens are layer widths; the optional single ``dp(p)``
token sets the coding-layer drop probability and marks the boundary
between encoder widths (last one is the coding dim) and decoder hidden
widths.  Without a ``dp`` token the widths are split down the middle,
encoder taking the extra one when the count is odd, which makes
"n,512,512,1024,512,512,n" a 3-layer encoder with coding dim 1024 and a
3-layer decoder.

Activation and tied-ness are carried alongside the string (flags, not
tokens).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

import numpy as np

from .activations import Activation
from .model import AutoencoderModel, build_model

_DP_RE = re.compile(r"^dp\((.*)\)$")


class ArchitectureError(ValueError):
    """Raised when an architecture string cannot be parsed."""


@dataclass(frozen=True)
class ArchitectureSpec:
    """Parsed architecture: encoder widths, drop probability, decoder widths.

    ``encoder_dims[-1]`` is the coding dim; ``decoder_dims`` excludes the
    final projection back to n items.
    """

    encoder_dims: tuple[int, ...]
    decoder_dims: tuple[int, ...]
    drop_prob: float = 0.0
    activation: Activation = Activation("selu")
    tied: bool = False

    def __post_init__(self) -> None:
        if not self.encoder_dims:
            raise ArchitectureError("architecture needs at least a coding layer")
        for d in (*self.encoder_dims, *self.decoder_dims):
            if d < 1:
                raise ArchitectureError(f"layer width must be >= 1, got {d}")
        if not 0 <= self.drop_prob < 1:
            raise ArchitectureError(f"drop probability must be in [0, 1), got {self.drop_prob}")
        if self.drop_prob > 0 and not self.decoder_dims:
            # The string grammar has no slot for dp after the last width, so
            # such a spec could never round-trip.
            raise ArchitectureError(
                "dropout requires at least one decoder hidden layer "
                "(dp(...) cannot be the last hidden token)")

    @property
    def coding_dim(self) -> int:
        return self.encoder_dims[-1]

    @property
    def n_layers(self) -> int:
        return len(self.encoder_dims) + len(self.decoder_dims) + 1

    def with_drop_prob(self, p: float) -> "ArchitectureSpec":
        return replace(self, drop_prob=p)

    def with_activation(self, activation: Activation) -> "ArchitectureSpec":
        return replace(self, activation=activation)

    def with_tied(self, tied: bool) -> "ArchitectureSpec":
        return replace(self, tied=tied)

    def to_string(self) -> str:
        """Canonical string form; inverse of :func:`parse_architecture`.

        A ``dp`` token is emitted whenever the drop probability is nonzero,
        and also (as ``dp(0.0)``) when the encoder/decoder division differs
        from the default midpoint split, so the division survives a
        round trip.
        """
        ints = [*self.encoder_dims, *self.decoder_dims]
        default_split = math.ceil(len(ints) / 2)
        tokens = [str(d) for d in ints]
        if self.drop_prob > 0 or len(self.encoder_dims) != default_split:
            tokens.insert(len(self.encoder_dims), f"dp({self.drop_prob!r})")
        return ",".join(["n", *tokens, "n"])

    def build(self, n_items: int, *, seed: int = 0, dtype=np.float32) -> AutoencoderModel:
        """Resolve ``n`` against a dataset's item count and initialize a model."""
        return build_model(list(self.encoder_dims), list(self.decoder_dims), n_items,
                           self.activation, tied=self.tied, drop_prob=self.drop_prob,
                           seed=seed, dtype=dtype)

    def count_parameters(self, n_items: int) -> int:
        """Closed-form trainable parameter count: sum of out*in + out per layer.

        Tied models count each shared weight once but keep both bias sets.
        """
        chain = [n_items, *self.encoder_dims, *self.decoder_dims, n_items]
        weights = sum(o * i for i, o in zip(chain, chain[1:]))
        biases = sum(chain[1:])
        if self.tied:
            if chain != chain[::-1] or len(chain) % 2 == 0:
                raise ArchitectureError(f"tied weights need mirrored dims, got {chain}")
            weights //= 2
        return weights + biases


def parse_architecture(s: str, *, activation: Activation = Activation("selu"),
                       tied: bool = False) -> ArchitectureSpec:
    """Parse an architecture string; raises ArchitectureError with the
    offending token position on malformed input."""
    if not s or not s.strip():
        raise ArchitectureError("empty architecture string")
    tokens = [t.strip() for t in s.split(",")]
    if tokens[0] != "n":
        raise ArchitectureError(f"architecture must start with 'n', got {tokens[0]!r} at position 0")
    if len(tokens) < 2 or tokens[-1] != "n":
        raise ArchitectureError(
            f"architecture must end with 'n', got {tokens[-1]!r} at position {len(tokens) - 1}"
        )
    hidden = tokens[1:-1]
    if not hidden:
        raise ArchitectureError("architecture has no layers between the 'n' endpoints")

    ints: list[int] = []
    dp_index: int | None = None
    drop_prob = 0.0
    for pos, tok in enumerate(hidden, start=1):
        m = _DP_RE.match(tok)
        if m:
            if dp_index is not None:
                raise ArchitectureError(f"multiple dp(...) tokens; second at position {pos}")
            try:
                drop_prob = float(m.group(1))
            except ValueError:
                raise ArchitectureError(
                    f"bad drop probability {m.group(1)!r} at position {pos}"
                ) from None
            if not 0 <= drop_prob < 1:
                raise ArchitectureError(
                    f"drop probability must be in [0, 1), got {drop_prob} at position {pos}"
                )
            dp_index = len(ints)
            continue
        try:
            width = int(tok)
        except ValueError:
            raise ArchitectureError(f"bad token {tok!r} at position {pos}") from None
        if width < 1:
            raise ArchitectureError(f"layer width must be >= 1, got {width} at position {pos}")
        ints.append(width)

    if dp_index is not None:
        if dp_index == 0:
            raise ArchitectureError("dp(...) before any encoder layer leaves the encoder empty")
        if dp_index == len(ints):
            raise ArchitectureError("dp(...) after the last width leaves the decoder empty")
        split = dp_index
    else:
        if not ints:
            raise ArchitectureError("architecture has no layer widths")
        split = math.ceil(len(ints) / 2)

    return ArchitectureSpec(encoder_dims=tuple(ints[:split]), decoder_dims=tuple(ints[split:]),
                            drop_prob=drop_prob, activation=activation, tied=tied)


def spec_of(model: AutoencoderModel) -> ArchitectureSpec:
    """Recover the architecture spec of a built model (for checkpoints)."""
    return ArchitectureSpec(
        encoder_dims=tuple(layer.out_dim for layer in model.encoder),
        decoder_dims=tuple(layer.out_dim for layer in model.decoder[:-1]),
        drop_prob=model.drop_prob,
        activation=model.activation,
        tied=model.tied,
    )
