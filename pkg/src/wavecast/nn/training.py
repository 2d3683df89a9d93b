"""Full-batch gradient training for the stacked recurrent forecaster.

Gradients are computed by backpropagation through time over the whole window
batch, updated with Adam under a global-norm clip, and validated on a trailing
slice of the samples for early stopping.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .model import (
    NetworkSpec,
    ShapeMismatch,
    _direction_backward,
    forward_batch,
    init_params,
    layer_params,
    make_dropout_masks,
    predict,
    weight_keys,
)

__all__ = [
    "TooFewSamples",
    "DivergedLoss",
    "TrainingConfig",
    "TrainedModel",
    "loss_and_gradients",
    "clip_by_global_norm",
    "train",
    "predict_multi_step",
]

logger = logging.getLogger(__name__)

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8


class TooFewSamples(ValueError):
    """Not enough windowed samples to fit and validate the model."""


class DivergedLoss(RuntimeError):
    """The training objective became non-finite."""


@dataclass(frozen=True)
class TrainingConfig:
    """Optimizer and schedule settings (full-batch updates only)."""

    learning_rate: float = 0.01
    l2_penalty: float = 1e-6
    max_epochs: int = 500
    patience: int = 25
    grad_clip_norm: float = 5.0
    restarts: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if not float(self.learning_rate) > 0.0:
            raise ValueError("learning_rate must be positive")
        if not float(self.l2_penalty) >= 0.0:
            raise ValueError("l2_penalty must be non-negative")
        if int(self.max_epochs) < 1:
            raise ValueError("max_epochs must be at least 1")
        if not 1 <= int(self.patience) <= int(self.max_epochs):
            raise ValueError("patience must lie in [1, max_epochs]")
        if not float(self.grad_clip_norm) > 0.0:
            raise ValueError("grad_clip_norm must be positive")
        if int(self.restarts) < 1:
            raise ValueError("restarts must be at least 1")
        object.__setattr__(self, "learning_rate", float(self.learning_rate))
        object.__setattr__(self, "l2_penalty", float(self.l2_penalty))
        object.__setattr__(self, "max_epochs", int(self.max_epochs))
        object.__setattr__(self, "patience", int(self.patience))
        object.__setattr__(self, "grad_clip_norm", float(self.grad_clip_norm))
        object.__setattr__(self, "restarts", int(self.restarts))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class TrainedModel:
    """Fitted parameters with their architecture and loss traces.

    `train_trace[k]` is the full training objective (MSE plus weight penalty)
    evaluated by epoch k's gradient pass, before its update; `validation_trace[k]`
    is the pure validation MSE measured after that update. `best_epoch` is the
    1-based epoch whose validation MSE was lowest; `params` are restored from it.
    """

    spec: NetworkSpec
    params: dict[str, np.ndarray]
    train_trace: tuple[float, ...]
    validation_trace: tuple[float, ...]
    best_epoch: int
    config: TrainingConfig

    def __post_init__(self) -> None:
        if not all(np.isfinite(v) for v in self.train_trace):
            raise ValueError("non-finite value in the training trace")
        if not all(np.isfinite(v) for v in self.validation_trace):
            raise ValueError("non-finite value in the validation trace")
        if not 1 <= self.best_epoch <= len(self.train_trace):
            raise ValueError("best_epoch must index into the traces")


def loss_and_gradients(
    params: Mapping[str, np.ndarray],
    spec: NetworkSpec,
    windows: np.ndarray,
    targets: np.ndarray,
    l2_penalty: float,
    dropout_masks: Sequence[np.ndarray] | None = None,
) -> tuple[float, dict[str, np.ndarray]]:
    """Training objective and its exact gradients for one full batch.

    Passing explicit `dropout_masks` fixes the stochastic part, which makes the
    objective a deterministic function of the parameters (as finite-difference
    checks require).
    """
    x = np.asarray(windows, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    if x.ndim != 3:
        raise ShapeMismatch("windows must be (batch, time, features)")
    if y.shape != (x.shape[0],):
        raise ShapeMismatch(f"targets must be ({x.shape[0]},), got {y.shape}")
    batch = x.shape[0]
    predictions, state = forward_batch(
        params, spec, x, dropout_masks=dropout_masks, collect_caches=True
    )
    caches = state["caches"]
    residual = predictions - y
    mse = float(np.mean(residual**2))
    penalty = sum(float(np.sum(params[k] ** 2)) for k in weight_keys(params))
    objective = mse + float(l2_penalty) * penalty

    grads: dict[str, np.ndarray] = {}
    dpred = 2.0 * residual / batch
    grads["head.w"] = state["last"].T @ dpred
    grads["head.b"] = np.array([dpred.sum()])
    units = spec.units_per_layer
    d_seq = np.zeros_like(state["top"])
    d_seq[:, -1, :] = np.outer(dpred, params["head.w"])
    for l in range(spec.num_layers - 1, -1, -1):
        if l < spec.num_layers - 1 and dropout_masks is not None:
            d_seq = d_seq * dropout_masks[l]
        layer = layer_params(params, spec, l)
        cache = caches[l]
        d_fwd_h = d_seq[:, :, :units]
        dx_fwd, d_w, d_u, d_b = _direction_backward(
            layer.forward.w, layer.forward.u, cache["fwd"], d_fwd_h
        )
        grads[f"layer{l}.fwd.W"] = d_w
        grads[f"layer{l}.fwd.U"] = d_u
        grads[f"layer{l}.fwd.b"] = d_b
        if layer.backward is not None:
            d_bwd_h = d_seq[:, ::-1, units:]
            dx_rev, d_w, d_u, d_b = _direction_backward(
                layer.backward.w, layer.backward.u, cache["bwd"], d_bwd_h
            )
            grads[f"layer{l}.bwd.W"] = d_w
            grads[f"layer{l}.bwd.U"] = d_u
            grads[f"layer{l}.bwd.b"] = d_b
            d_seq = dx_fwd + dx_rev[:, ::-1]
        else:
            d_seq = dx_fwd
    if l2_penalty:
        for key in weight_keys(params):
            grads[key] = grads[key] + 2.0 * float(l2_penalty) * params[key]
    return objective, grads


def clip_by_global_norm(
    grads: dict[str, np.ndarray], max_norm: float
) -> tuple[dict[str, np.ndarray], float]:
    """Scale all gradients jointly so their combined L2 norm is at most max_norm."""
    total = float(np.sqrt(sum(float(np.sum(g**2)) for g in grads.values())))
    if total > max_norm > 0.0:
        scale = max_norm / total
        grads = {k: g * scale for k, g in grads.items()}
    return grads, total


def train(
    windows: np.ndarray,
    targets: np.ndarray,
    spec: NetworkSpec,
    config: TrainingConfig | None = None,
    validation_fraction: float = 0.2,
) -> TrainedModel:
    """Fit the forecaster on windowed samples with early stopping.

    The trailing `validation_fraction` of the samples (at least one) is held
    out in temporal order; training stops once the validation MSE has not
    improved for `patience` consecutive epochs, and the parameters from the
    best epoch are restored. With `restarts` > 1 the whole schedule reruns
    from fresh seed-derived initializations and the run with the lowest
    validation MSE wins, which guards against the occasional bad local
    optimum of full-batch training. Raises TooFewSamples when the batch is
    smaller than 2 * window_length + patience, and DivergedLoss if the
    objective or a validation score becomes non-finite.
    """
    if config is None:
        config = TrainingConfig()
    x = np.asarray(windows, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    if x.ndim != 3:
        raise ShapeMismatch("windows must be (batch, time, features)")
    if x.shape[1] != spec.window_length or x.shape[2] != spec.input_dim:
        raise ShapeMismatch(
            f"windows must be (batch, {spec.window_length}, {spec.input_dim}), "
            f"got {x.shape}"
        )
    if y.shape != (x.shape[0],):
        raise ShapeMismatch(f"targets must be ({x.shape[0]},), got {y.shape}")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise ValueError("windows and targets must be finite")
    batch = x.shape[0]
    required = 2 * spec.window_length + config.patience
    if batch < required:
        raise TooFewSamples(
            f"need at least {required} samples "
            f"(2 * window_length + patience), got {batch}"
        )
    if not 0.0 < validation_fraction < 1.0:
        raise ValueError("validation_fraction must lie in (0, 1)")
    n_val = max(1, int(round(batch * validation_fraction)))
    if n_val >= batch:
        n_val = batch - 1
    x_train, y_train = x[: batch - n_val], y[: batch - n_val]
    x_val, y_val = x[batch - n_val :], y[batch - n_val :]

    def run_schedule(init_seed: int) -> TrainedModel:
        rng = np.random.default_rng(init_seed)
        params = init_params(spec, rng)
        moments_m = {k: np.zeros_like(v) for k, v in params.items()}
        moments_v = {k: np.zeros_like(v) for k, v in params.items()}
        step = 0
        use_dropout = spec.dropout_rate > 0.0 and spec.num_layers > 1
        best_val = np.inf
        best_params = {k: v.copy() for k, v in params.items()}
        best_epoch = 1
        epochs_without_improvement = 0
        train_trace: list[float] = []
        val_trace: list[float] = []

        for epoch in range(1, config.max_epochs + 1):
            masks = (
                make_dropout_masks(spec, x_train.shape[0], spec.window_length, rng)
                if use_dropout
                else None
            )
            objective, grads = loss_and_gradients(
                params, spec, x_train, y_train, config.l2_penalty, dropout_masks=masks
            )
            if not np.isfinite(objective):
                raise DivergedLoss(
                    f"training objective became {objective} at epoch {epoch}"
                )
            grads, _ = clip_by_global_norm(grads, config.grad_clip_norm)
            step += 1
            correction1 = 1.0 - _ADAM_BETA1**step
            correction2 = 1.0 - _ADAM_BETA2**step
            for key, grad in grads.items():
                moments_m[key] = _ADAM_BETA1 * moments_m[key] + (1.0 - _ADAM_BETA1) * grad
                moments_v[key] = _ADAM_BETA2 * moments_v[key] + (1.0 - _ADAM_BETA2) * grad**2
                m_hat = moments_m[key] / correction1
                v_hat = moments_v[key] / correction2
                params[key] = params[key] - config.learning_rate * m_hat / (
                    np.sqrt(v_hat) + _ADAM_EPS
                )
            val_mse = float(np.mean((predict(params, spec, x_val) - y_val) ** 2))
            if not np.isfinite(val_mse):
                raise DivergedLoss(f"validation MSE became {val_mse} at epoch {epoch}")
            train_trace.append(float(objective))
            val_trace.append(val_mse)
            if val_mse < best_val:
                best_val = val_mse
                best_params = {k: v.copy() for k, v in params.items()}
                best_epoch = epoch
                epochs_without_improvement = 0
            else:
                epochs_without_improvement += 1
                if epochs_without_improvement >= config.patience:
                    logger.debug(
                        "early stop at epoch %d (best validation MSE %.6g at epoch %d)",
                        epoch,
                        best_val,
                        best_epoch,
                    )
                    break

        return TrainedModel(
            spec=spec,
            params=best_params,
            train_trace=tuple(train_trace),
            validation_trace=tuple(val_trace),
            best_epoch=best_epoch,
            config=config,
        )

    best_model: TrainedModel | None = None
    best_score = np.inf
    for restart in range(config.restarts):
        if restart == 0:
            init_seed = config.seed
        else:
            init_seed = int(
                np.random.SeedSequence([config.seed, restart]).generate_state(1)[0]
            )
        candidate = run_schedule(init_seed)
        score = min(candidate.validation_trace)
        if best_model is None or score < best_score:
            best_model = candidate
            best_score = score
    assert best_model is not None
    return best_model


def predict_multi_step(
    model: TrainedModel,
    last_window: np.ndarray,
    horizon: int,
    endogenous_channel: int = 0,
) -> np.ndarray:
    """Recursive forecasts `horizon` steps past the window.

    Each step appends a new row whose endogenous channel holds the fresh
    prediction while every exogenous channel repeats its last observed value,
    then drops the oldest row. The first k forecasts therefore depend only on
    the window and k, so extending the horizon never changes earlier steps.
    """
    if int(horizon) < 1:
        raise ValueError("horizon must be at least 1")
    window = np.array(last_window, dtype=np.float64)
    spec = model.spec
    if window.shape != (spec.window_length, spec.input_dim):
        raise ShapeMismatch(
            f"last_window must be ({spec.window_length}, {spec.input_dim}), "
            f"got {window.shape}"
        )
    if not 0 <= int(endogenous_channel) < spec.input_dim:
        raise ValueError("endogenous_channel out of range")
    forecasts = np.empty(int(horizon))
    for k in range(int(horizon)):
        value = float(predict(model.params, spec, window[None])[0])
        forecasts[k] = value
        next_row = window[-1].copy()
        next_row[endogenous_channel] = value
        window = np.vstack([window[1:], next_row])
    return forecasts
