"""Deep autoencoder over item-rating rows: layers, forward pass, backprop.

A model is an ordered stack of fully connected layers, ``out = f(W x + b)``,
split into an encoder (items -> coding space) and a decoder (coding space
-> items).  Input rows are sparse rating vectors; the output is a dense
row of predictions for every item.

Tied models store decoder weights as transposed *views* of the mirror
encoder weights: one array, two orientations, so an in-place optimizer
update keeps both sides coherent and the model has almost half the free
parameters of its untied twin.  Biases are never shared.

Dropout, when enabled, is applied in exactly one place: the encoder
output (the coding layer), using inverted scaling so that evaluation
needs no correction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .activations import Activation, RANGE_LIMITED, apply, derivative
from .losses import Batch

TRAIN = "train"
EVAL = "eval"


@dataclass
class LayerParams:
    """One fully connected layer: weight (out_dim, in_dim), bias (out_dim,)."""

    weight: np.ndarray
    bias: np.ndarray
    activation: Activation

    def __post_init__(self) -> None:
        if self.weight.ndim != 2 or self.bias.ndim != 1:
            raise ValueError("weight must be 2-D and bias 1-D")
        if self.weight.shape[0] != self.bias.shape[0]:
            raise ValueError(
                f"bias length {self.bias.shape[0]} != weight rows {self.weight.shape[0]}"
            )

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]


def init_xavier(shape: tuple[int, int], rng: int | np.random.Generator) -> np.ndarray:
    """Glorot-uniform weight matrix: i.i.d. uniform on +-sqrt(6/(fan_in+fan_out)).

    Deterministic for a fixed integer seed.  Biases are not drawn here;
    they start at zero.
    """
    out_dim, in_dim = shape
    if out_dim < 1 or in_dim < 1:
        raise ValueError(f"layer dimensions must be >= 1, got {shape}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    bound = np.sqrt(6.0 / (in_dim + out_dim))
    return rng.uniform(-bound, bound, size=(out_dim, in_dim))


@dataclass
class ForwardTape:
    """Everything backward needs to replay a forward pass exactly.

    ``layer_inputs[i]`` and ``preacts[i]`` are the input and pre-activation
    of stack layer i (encoder layers first, then decoder layers).
    ``coding_mask`` is the boolean dropout keep-mask sampled at the coding
    layer, or None when dropout was not applied.
    """

    model: "AutoencoderModel"
    mode: str
    layer_inputs: list[np.ndarray] = field(default_factory=list)
    preacts: list[np.ndarray] = field(default_factory=list)
    coding_mask: np.ndarray | None = None


class AutoencoderModel:
    """Encoder/decoder layer stack with optional tied weights.

    Use :func:`build_model` (or ``ArchitectureSpec.build``) rather than
    constructing layer lists by hand.
    """

    def __init__(self, encoder: list[LayerParams], decoder: list[LayerParams],
                 n_items: int, *, tied: bool = False, drop_prob: float = 0.0,
                 dtype=np.float32):
        if not encoder or not decoder:
            raise ValueError("encoder and decoder must each have at least one layer")
        if encoder[0].in_dim != n_items or decoder[-1].out_dim != n_items:
            raise ValueError("encoder input dim and decoder output dim must equal n_items")
        if encoder[-1].out_dim != decoder[0].in_dim:
            raise ValueError("coding dim mismatch between encoder output and decoder input")
        for prev, nxt in zip(encoder, encoder[1:]):
            if prev.out_dim != nxt.in_dim:
                raise ValueError("encoder layer dims do not chain")
        for prev, nxt in zip(decoder, decoder[1:]):
            if prev.out_dim != nxt.in_dim:
                raise ValueError("decoder layer dims do not chain")
        if not 0 <= drop_prob < 1:
            raise ValueError(f"drop_prob must be in [0, 1), got {drop_prob}")
        if tied:
            for i, dec in enumerate(decoder):
                enc = encoder[len(encoder) - 1 - i]
                if dec.weight.base is not enc.weight or dec.weight.shape != enc.weight.shape[::-1]:
                    raise ValueError("tied model requires decoder weights to be views of "
                                     "transposed mirror encoder weights")
        self.encoder = encoder
        self.decoder = decoder
        self.n_items = n_items
        self.tied = tied
        self.drop_prob = drop_prob
        self.dtype = np.dtype(dtype)

    @property
    def layers(self) -> list[LayerParams]:
        return self.encoder + self.decoder

    @property
    def coding_dim(self) -> int:
        return self.encoder[-1].out_dim

    @property
    def activation(self) -> Activation:
        """The activation the model was configured with (first-layer kind)."""
        return self.encoder[0].activation

    def parameters(self) -> dict[str, np.ndarray]:
        """Unique trainable arrays, keyed enc{i}/dec{i}; shared weights appear once."""
        params: dict[str, np.ndarray] = {}
        for i, layer in enumerate(self.encoder):
            params[f"enc{i}.weight"] = layer.weight
            params[f"enc{i}.bias"] = layer.bias
        for i, layer in enumerate(self.decoder):
            if not self.tied:
                params[f"dec{i}.weight"] = layer.weight
            params[f"dec{i}.bias"] = layer.bias
        return params

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters().values())

    def load_parameters(self, values: dict[str, np.ndarray]) -> None:
        """Copy values into the model's arrays in place (keeps tied views intact)."""
        params = self.parameters()
        if set(values) != set(params):
            missing = set(params) ^ set(values)
            raise ValueError(f"parameter name mismatch: {sorted(missing)}")
        for name, arr in params.items():
            src = values[name]
            if src.shape != arr.shape:
                raise ValueError(f"shape mismatch for {name}: {src.shape} != {arr.shape}")
            np.copyto(arr, src)

    # ---------------------------------------------------------------- forward

    def forward(self, batch: Batch, mode: str = EVAL,
                rng: np.random.Generator | None = None, *,
                coding_mask: np.ndarray | None = None,
                use_dropout: bool | None = None) -> tuple[np.ndarray, ForwardTape]:
        """Run the batch through the stack; returns (dense output, tape).

        TRAIN mode samples a fresh dropout mask on the coding layer (unless
        ``coding_mask`` replays a recorded one, or ``use_dropout=False``
        suppresses it) and records everything backward needs.  EVAL mode is
        deterministic and applies no dropout.
        """
        if mode not in (TRAIN, EVAL):
            raise ValueError(f"mode must be {TRAIN!r} or {EVAL!r}, got {mode!r}")
        x = batch.ratings
        if x.ndim != 2 or x.shape[1] != self.n_items:
            raise ValueError(f"batch row width {x.shape} does not match n_items={self.n_items}")
        if x.dtype != self.dtype:
            x = x.astype(self.dtype)

        dropout = (mode == TRAIN) if use_dropout is None else use_dropout
        dropout = dropout and self.drop_prob > 0

        tape = ForwardTape(model=self, mode=mode)
        for layer in self.encoder:
            z = x @ layer.weight.T + layer.bias
            tape.layer_inputs.append(x)
            tape.preacts.append(z)
            x = apply(layer.activation, z)

        if dropout:
            if coding_mask is not None:
                keep = coding_mask
                if keep.shape != x.shape:
                    raise ValueError("coding_mask shape does not match coding layer")
            else:
                if rng is None:
                    raise ValueError("TRAIN-mode forward with dropout needs an rng "
                                     "(or an explicit coding_mask)")
                keep = rng.random(x.shape) >= self.drop_prob
            scale = self.dtype.type(1.0 / (1.0 - self.drop_prob))
            x = x * (keep.astype(self.dtype) * scale)
            tape.coding_mask = keep

        for layer in self.decoder:
            z = x @ layer.weight.T + layer.bias
            tape.layer_inputs.append(x)
            tape.preacts.append(z)
            x = apply(layer.activation, z)

        return x, tape

    # --------------------------------------------------------------- backward

    def backward(self, tape: ForwardTape, output_grad: np.ndarray) -> dict[str, np.ndarray]:
        """Backpropagate a loss gradient through a recorded forward pass.

        Returns gradients keyed like :meth:`parameters`.  For tied models the
        shared weight gradient is the sum of the encoder-side and transposed
        decoder-side contributions.  The recorded dropout mask is replayed
        exactly.
        """
        if tape.model is not self:
            raise ValueError("tape was recorded by a different model")
        n_enc = len(self.encoder)
        if output_grad.shape != tape.preacts[-1].shape:
            raise ValueError(
                f"output_grad shape {output_grad.shape} does not match forward output "
                f"{tape.preacts[-1].shape}"
            )
        g = output_grad.astype(self.dtype, copy=False)

        grads: dict[str, np.ndarray] = {}
        for i in range(len(self.decoder) - 1, -1, -1):
            layer = self.decoder[i]
            k = n_enc + i
            dz = g * derivative(layer.activation, tape.preacts[k])
            gw = dz.T @ tape.layer_inputs[k]
            grads[f"dec{i}.bias"] = dz.sum(axis=0)
            if self.tied:
                name = f"enc{n_enc - 1 - i}.weight"
                grads[name] = grads.get(name, 0) + gw.T
            else:
                grads[f"dec{i}.weight"] = gw
            g = dz @ layer.weight

        if tape.coding_mask is not None:
            scale = self.dtype.type(1.0 / (1.0 - self.drop_prob))
            g = g * (tape.coding_mask.astype(self.dtype) * scale)

        for i in range(n_enc - 1, -1, -1):
            layer = self.encoder[i]
            dz = g * derivative(layer.activation, tape.preacts[i])
            gw = dz.T @ tape.layer_inputs[i]
            name = f"enc{i}.weight"
            grads[name] = grads.get(name, 0) + gw
            grads[f"enc{i}.bias"] = dz.sum(axis=0)
            if i > 0:
                g = dz @ layer.weight

        return grads


def build_model(encoder_dims: list[int], decoder_dims: list[int], n_items: int,
                activation: Activation, *, tied: bool = False, drop_prob: float = 0.0,
                seed: int = 0, dtype=np.float32) -> AutoencoderModel:
    """Construct a Xavier-initialized model from dimension lists.

    ``encoder_dims`` are the encoder layer widths (last one is the coding
    dim); ``decoder_dims`` are the decoder hidden widths, to which the
    final projection back to ``n_items`` is appended.  Range-limited
    activations (sigmoid, tanh) force a linear output layer; every other
    activation is applied on the output layer too.  Tied models require a
    palindromic dimension chain.
    """
    if n_items < 1:
        raise ValueError("n_items must be >= 1")
    if not encoder_dims:
        raise ValueError("encoder needs at least one layer (the coding layer)")
    dtype = np.dtype(dtype)
    rng = np.random.default_rng(seed)

    enc_chain = [n_items] + list(encoder_dims)
    dec_chain = [encoder_dims[-1]] + list(decoder_dims) + [n_items]
    if tied and enc_chain != dec_chain[::-1]:
        raise ValueError(
            f"tied weights need mirrored dims; encoder chain {enc_chain} vs "
            f"decoder chain {dec_chain}"
        )

    out_act = Activation("linear") if activation.kind in RANGE_LIMITED else activation

    encoder = []
    for in_dim, out_dim in zip(enc_chain, enc_chain[1:]):
        w = init_xavier((out_dim, in_dim), rng).astype(dtype)
        encoder.append(LayerParams(w, np.zeros(out_dim, dtype=dtype), activation))

    decoder = []
    n_dec = len(dec_chain) - 1
    for i, (in_dim, out_dim) in enumerate(zip(dec_chain, dec_chain[1:])):
        act = out_act if i == n_dec - 1 else activation
        if tied:
            w = encoder[len(encoder) - 1 - i].weight.T
        else:
            w = init_xavier((out_dim, in_dim), rng).astype(dtype)
        decoder.append(LayerParams(w, np.zeros(out_dim, dtype=dtype), act))

    return AutoencoderModel(encoder, decoder, n_items, tied=tied,
                            drop_prob=drop_prob, dtype=dtype)
