"""Stacked (bi)directional LSTM forecaster with exact-gradient training."""

from .checkpoint import (
    FORMAT_NAME,
    FORMAT_VERSION,
    CheckpointError,
    load_checkpoint,
    save_checkpoint,
)
from .model import (
    DirectionParams,
    LayerParams,
    NetworkSpec,
    ShapeMismatch,
    forward_batch,
    forward_bilayer,
    forward_cell,
    forward_stacked,
    init_params,
    layer_params,
    loss,
    make_dropout_masks,
    predict,
    weight_keys,
)
from .training import (
    DivergedLoss,
    TooFewSamples,
    TrainedModel,
    TrainingConfig,
    clip_by_global_norm,
    loss_and_gradients,
    predict_multi_step,
    train,
)

__all__ = [
    "CheckpointError",
    "DirectionParams",
    "DivergedLoss",
    "FORMAT_NAME",
    "FORMAT_VERSION",
    "LayerParams",
    "NetworkSpec",
    "ShapeMismatch",
    "TooFewSamples",
    "TrainedModel",
    "TrainingConfig",
    "clip_by_global_norm",
    "forward_batch",
    "forward_bilayer",
    "forward_cell",
    "forward_stacked",
    "init_params",
    "layer_params",
    "load_checkpoint",
    "loss",
    "loss_and_gradients",
    "make_dropout_masks",
    "predict",
    "predict_multi_step",
    "save_checkpoint",
    "train",
    "weight_keys",
]
