"""Stacked bidirectional LSTM regressor built directly on numpy arrays.

Parameters live in a flat dict keyed ``layer{l}.{direction}.W|U|b`` plus
``head.w`` and ``head.b``. Per direction, ``W`` has shape (4*units, input_dim)
and ``U`` (4*units, units); rows are stacked gate blocks in the order
[input, forget, candidate, output]. The scalar head reads the last time step
of the top layer's output sequence (2*units features in bidirectional mode,
units otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.special import expit

from ..series import LengthMismatch

__all__ = [
    "ShapeMismatch",
    "NetworkSpec",
    "DirectionParams",
    "LayerParams",
    "init_params",
    "layer_params",
    "forward_cell",
    "forward_bilayer",
    "forward_stacked",
    "forward_batch",
    "predict",
    "make_dropout_masks",
    "loss",
    "weight_keys",
]


class ShapeMismatch(ValueError):
    """An input or parameter tensor has an incompatible shape."""


@dataclass(frozen=True)
class NetworkSpec:
    """Architecture of the forecaster.

    `dropout_rate` is the removal probability of inter-layer dropout (0 turns
    it off; retention is 1 - dropout_rate). `mode` selects bidirectional
    ("bilstm") or single-direction ("lstm") recurrence.
    """

    input_dim: int
    window_length: int = 12
    units_per_layer: int = 32
    num_layers: int = 1
    dropout_rate: float = 0.1
    mode: str = "bilstm"

    def __post_init__(self) -> None:
        if int(self.input_dim) < 1:
            raise ValueError("input_dim must be at least 1")
        if int(self.window_length) < 1:
            raise ValueError("window_length must be at least 1")
        if int(self.units_per_layer) < 1:
            raise ValueError("units_per_layer must be at least 1")
        if int(self.num_layers) < 1:
            raise ValueError("num_layers must be at least 1")
        if not 0.0 <= float(self.dropout_rate) < 1.0:
            raise ValueError("dropout_rate must lie in [0, 1)")
        if self.mode not in ("bilstm", "lstm"):
            raise ValueError("mode must be 'bilstm' or 'lstm'")
        for name in ("input_dim", "window_length", "units_per_layer", "num_layers"):
            object.__setattr__(self, name, int(getattr(self, name)))
        object.__setattr__(self, "dropout_rate", float(self.dropout_rate))

    @property
    def directions(self) -> tuple[str, ...]:
        return ("fwd", "bwd") if self.mode == "bilstm" else ("fwd",)

    @property
    def layer_output_dim(self) -> int:
        return self.units_per_layer * len(self.directions)

    def layer_input_dim(self, layer: int) -> int:
        return self.input_dim if layer == 0 else self.layer_output_dim


@dataclass(frozen=True)
class DirectionParams:
    """One direction's gate parameters: W (4H, D_in), U (4H, H), b (4H,)."""

    w: np.ndarray
    u: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class LayerParams:
    """Both directions of one stacked layer (backward absent in lstm mode)."""

    forward: DirectionParams
    backward: DirectionParams | None = None


def layer_params(params: Mapping[str, np.ndarray], spec: NetworkSpec, layer: int) -> LayerParams:
    """View one layer of the flat parameter dict as a LayerParams record."""
    def direction(d: str) -> DirectionParams:
        return DirectionParams(
            w=params[f"layer{layer}.{d}.W"],
            u=params[f"layer{layer}.{d}.U"],
            b=params[f"layer{layer}.{d}.b"],
        )

    return LayerParams(
        forward=direction("fwd"),
        backward=direction("bwd") if spec.mode == "bilstm" else None,
    )


def init_params(spec: NetworkSpec, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Uniform fan-balanced initialization with forget-gate biases at one.

    Each gate block is drawn from U(-limit, limit) with limit = sqrt(6 / (fan_in
    + fan_out)); starting the forget biases at one keeps early cell states
    flowing so gradients survive the first epochs.
    """
    h = spec.units_per_layer
    params: dict[str, np.ndarray] = {}
    for layer in range(spec.num_layers):
        d_in = spec.layer_input_dim(layer)
        for direction in spec.directions:
            limit_w = np.sqrt(6.0 / (d_in + h))
            limit_u = np.sqrt(6.0 / (h + h))
            params[f"layer{layer}.{direction}.W"] = rng.uniform(-limit_w, limit_w, (4 * h, d_in))
            params[f"layer{layer}.{direction}.U"] = rng.uniform(-limit_u, limit_u, (4 * h, h))
            b = np.zeros(4 * h)
            b[h : 2 * h] = 1.0
            params[f"layer{layer}.{direction}.b"] = b
    out_dim = spec.layer_output_dim
    limit_head = np.sqrt(6.0 / (out_dim + 1))
    params["head.w"] = rng.uniform(-limit_head, limit_head, out_dim)
    params["head.b"] = np.zeros(1)
    return params


def weight_keys(params: Mapping[str, np.ndarray]) -> list[str]:
    """Keys of the tensors counted as weights (biases are excluded)."""
    return [k for k in sorted(params) if k.endswith(".W") or k.endswith(".U") or k == "head.w"]


def _unpack_direction(params) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(params, DirectionParams):
        return params.w, params.u, params.b
    if isinstance(params, Mapping):
        return params["W"], params["U"], params["b"]
    w, u, b = params
    return w, u, b


def forward_cell(input_t, hidden_prev, cell_prev, params):
    """One LSTM cell step; accepts a single vector or a batch per argument.

    Gates: input/forget/output through the logistic sigmoid, candidate through
    tanh; cell = forget * cell_prev + input * candidate; hidden = output *
    tanh(cell).
    """
    w, u, b = _unpack_direction(params)
    if w.ndim != 2 or u.ndim != 2 or b.ndim != 1:
        raise ShapeMismatch("W and U must be matrices and b a vector")
    four_h, d_in = w.shape
    if four_h % 4 != 0:
        raise ShapeMismatch("W must have 4*units rows")
    h = four_h // 4
    if u.shape != (four_h, h) or b.shape != (four_h,):
        raise ShapeMismatch(f"U must be {(four_h, h)} and b {(four_h,)}")
    x = np.atleast_2d(np.asarray(input_t, dtype=np.float64))
    h_prev = np.atleast_2d(np.asarray(hidden_prev, dtype=np.float64))
    c_prev = np.atleast_2d(np.asarray(cell_prev, dtype=np.float64))
    if x.shape[-1] != d_in or h_prev.shape[-1] != h or c_prev.shape[-1] != h:
        raise ShapeMismatch(
            f"expected input width {d_in} and state width {h}, "
            f"got {x.shape[-1]} and {h_prev.shape[-1]}/{c_prev.shape[-1]}"
        )
    z = x @ w.T + h_prev @ u.T + b
    gate_i = expit(z[:, :h])
    gate_f = expit(z[:, h : 2 * h])
    gate_g = np.tanh(z[:, 2 * h : 3 * h])
    gate_o = expit(z[:, 3 * h :])
    cell = gate_f * c_prev + gate_i * gate_g
    hidden = gate_o * np.tanh(cell)
    if np.asarray(input_t).ndim == 1:
        return hidden[0], cell[0]
    return hidden, cell


def _run_direction(w: np.ndarray, u: np.ndarray, b: np.ndarray, x: np.ndarray):
    """Run one direction over a batch of sequences, caching gate activations.

    `x` has shape (batch, time, features); returns the hidden sequence
    (batch, time, units) and the cache needed for backpropagation.
    """
    batch, steps, _ = x.shape
    h = w.shape[0] // 4
    gate_i = np.empty((batch, steps, h))
    gate_f = np.empty((batch, steps, h))
    gate_g = np.empty((batch, steps, h))
    gate_o = np.empty((batch, steps, h))
    cells = np.empty((batch, steps, h))
    hiddens = np.empty((batch, steps, h))
    h_t = np.zeros((batch, h))
    c_t = np.zeros((batch, h))
    for t in range(steps):
        z = x[:, t] @ w.T + h_t @ u.T + b
        i_t = expit(z[:, :h])
        f_t = expit(z[:, h : 2 * h])
        g_t = np.tanh(z[:, 2 * h : 3 * h])
        o_t = expit(z[:, 3 * h :])
        c_t = f_t * c_t + i_t * g_t
        h_t = o_t * np.tanh(c_t)
        gate_i[:, t] = i_t
        gate_f[:, t] = f_t
        gate_g[:, t] = g_t
        gate_o[:, t] = o_t
        cells[:, t] = c_t
        hiddens[:, t] = h_t
    cache = {
        "x": x,
        "i": gate_i,
        "f": gate_f,
        "g": gate_g,
        "o": gate_o,
        "c": cells,
        "h": hiddens,
    }
    return hiddens, cache


def _direction_backward(w, u, cache, dh_seq):
    """Backpropagate one direction; returns (dx, dW, dU, db)."""
    x = cache["x"]
    batch, steps, _ = x.shape
    h = w.shape[0] // 4
    d_w = np.zeros_like(w)
    d_u = np.zeros_like(u)
    d_b = np.zeros(4 * h)
    dx = np.zeros_like(x)
    dh_next = np.zeros((batch, h))
    dc_next = np.zeros((batch, h))
    for t in range(steps - 1, -1, -1):
        gate_i = cache["i"][:, t]
        gate_f = cache["f"][:, t]
        gate_g = cache["g"][:, t]
        gate_o = cache["o"][:, t]
        c_t = cache["c"][:, t]
        c_prev = cache["c"][:, t - 1] if t > 0 else np.zeros((batch, h))
        h_prev = cache["h"][:, t - 1] if t > 0 else np.zeros((batch, h))
        tanh_c = np.tanh(c_t)
        dh = dh_seq[:, t] + dh_next
        do = dh * tanh_c
        dc = dh * gate_o * (1.0 - tanh_c**2) + dc_next
        di = dc * gate_g
        df = dc * c_prev
        dg = dc * gate_i
        dz = np.concatenate(
            [
                di * gate_i * (1.0 - gate_i),
                df * gate_f * (1.0 - gate_f),
                dg * (1.0 - gate_g**2),
                do * gate_o * (1.0 - gate_o),
            ],
            axis=1,
        )
        d_w += dz.T @ x[:, t]
        d_u += dz.T @ h_prev
        d_b += dz.sum(axis=0)
        dx[:, t] = dz @ w
        dh_next = dz @ u
        dc_next = dc * gate_f
    return dx, d_w, d_u, d_b


def forward_bilayer(inputs, layer: LayerParams):
    """One recurrent layer over a sequence; per-step outputs concatenate the
    forward hidden state with the backward one (when present).

    Accepts (time, features) or (batch, time, features); the backward pass is
    the forward recurrence run over the time-reversed input and re-reversed.
    """
    x = np.asarray(inputs, dtype=np.float64)
    single = x.ndim == 2
    if single:
        x = x[None]
    if x.ndim != 3:
        raise ShapeMismatch("inputs must be (time, features) or (batch, time, features)")
    if x.shape[1] < 1:
        raise ShapeMismatch("the input sequence is empty")
    h_fwd, _ = _run_direction(layer.forward.w, layer.forward.u, layer.forward.b, x)
    if layer.backward is None:
        out = h_fwd
    else:
        h_bwd_rev, _ = _run_direction(
            layer.backward.w, layer.backward.u, layer.backward.b, x[:, ::-1]
        )
        out = np.concatenate([h_fwd, h_bwd_rev[:, ::-1]], axis=2)
    return out[0] if single else out


def make_dropout_masks(
    spec: NetworkSpec, batch: int, steps: int, rng: np.random.Generator
) -> list[np.ndarray]:
    """Inverted-dropout masks for the gaps between stacked layers.

    Each mask is 0 with probability dropout_rate and 1/(1 - dropout_rate)
    otherwise, so the expected activation is unchanged and inference needs no
    rescaling. Returns num_layers - 1 masks of shape (batch, steps, features).
    """
    rate = spec.dropout_rate
    keep = 1.0 - rate
    masks = []
    for _ in range(spec.num_layers - 1):
        masks.append(
            (rng.random((batch, steps, spec.layer_output_dim)) >= rate) / keep
        )
    return masks


def forward_batch(
    params: Mapping[str, np.ndarray],
    spec: NetworkSpec,
    inputs: np.ndarray,
    dropout_masks: Sequence[np.ndarray] | None = None,
    collect_caches: bool = False,
):
    """Full stacked forward pass over a batch of windows.

    Returns (predictions, caches); `caches` is None unless requested. With
    `dropout_masks` given (training), each mask multiplies its layer's output
    before the next layer consumes it.
    """
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 3:
        raise ShapeMismatch("inputs must be (batch, time, features)")
    if x.shape[2] != spec.input_dim:
        raise ShapeMismatch(f"expected {spec.input_dim} input features, got {x.shape[2]}")
    if dropout_masks is not None and len(dropout_masks) != spec.num_layers - 1:
        raise ShapeMismatch("need one dropout mask per inter-layer gap")
    caches = [] if collect_caches else None
    current = x
    for l in range(spec.num_layers):
        layer = layer_params(params, spec, l)
        h_fwd, cache_fwd = _run_direction(layer.forward.w, layer.forward.u, layer.forward.b, current)
        if layer.backward is not None:
            h_bwd_rev, cache_bwd = _run_direction(
                layer.backward.w, layer.backward.u, layer.backward.b, current[:, ::-1]
            )
            out = np.concatenate([h_fwd, h_bwd_rev[:, ::-1]], axis=2)
        else:
            cache_bwd = None
            out = h_fwd
        if collect_caches:
            caches.append({"fwd": cache_fwd, "bwd": cache_bwd})
        if l < spec.num_layers - 1 and dropout_masks is not None:
            out = out * dropout_masks[l]
        current = out
    last = current[:, -1, :]
    predictions = last @ params["head.w"] + params["head.b"][0]
    if collect_caches:
        return predictions, {"caches": caches, "last": last, "top": current}
    return predictions, None


def forward_stacked(
    inputs,
    params: Mapping[str, np.ndarray],
    spec: NetworkSpec,
    training: bool = False,
    rng: np.random.Generator | None = None,
    dropout_masks: Sequence[np.ndarray] | None = None,
) -> float:
    """Scalar prediction for one window; dropout only applies when training.

    A training call with a positive dropout rate draws masks from `rng` unless
    explicit `dropout_masks` are supplied.
    """
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeMismatch("inputs must be (time, features)")
    masks = None
    if training and spec.dropout_rate > 0.0 and spec.num_layers > 1:
        if dropout_masks is not None:
            masks = list(dropout_masks)
        else:
            if rng is None:
                raise ValueError("training with dropout needs an rng or explicit masks")
            masks = make_dropout_masks(spec, 1, x.shape[0], rng)
    predictions, _ = forward_batch(params, spec, x[None], dropout_masks=masks)
    return float(predictions[0])


def predict(
    params: Mapping[str, np.ndarray], spec: NetworkSpec, windows: np.ndarray
) -> np.ndarray:
    """Deterministic batch predictions (no dropout)."""
    predictions, _ = forward_batch(params, spec, windows)
    return predictions


def loss(
    predictions,
    targets,
    l2_penalty: float,
    params: Mapping[str, np.ndarray],
) -> float:
    """Mean squared error plus l2_penalty times the squared-weight total.

    Bias vectors (including the head bias) are excluded from the penalty.
    """
    predicted = np.asarray(predictions, dtype=np.float64)
    observed = np.asarray(targets, dtype=np.float64)
    if predicted.shape != observed.shape:
        raise LengthMismatch(
            f"predictions shape {predicted.shape} != targets shape {observed.shape}"
        )
    mse = float(np.mean((predicted - observed) ** 2))
    penalty = sum(float(np.sum(params[k] ** 2)) for k in weight_keys(params))
    return mse + float(l2_penalty) * penalty
