"""Sliding-window sample assembly for the forecaster.

Default (component-augmented) design: each input row stacks the decomposition
components at one time step, followed by any feature columns; the target is
the next raw (normalized) series value, so one model learns to fuse the bands.
The decomposition-ensemble alternative instead builds one window set per
component, with that component's next value as the target, and the final
forecast is the sum of per-component forecasts.
"""

from __future__ import annotations

import numpy as np

__all__ = ["TooShort", "assemble_windows", "assemble_component_windows"]


class TooShort(ValueError):
    """The series does not cover even one window plus its target."""


def _stack_channels(
    components: np.ndarray | None,
    target: np.ndarray,
    features: np.ndarray | None,
    use_components: bool,
) -> np.ndarray:
    n = target.shape[0]
    blocks: list[np.ndarray] = []
    if use_components:
        comp = np.asarray(components, dtype=np.float64)
        if comp.ndim != 2 or comp.shape[1] != n:
            raise ValueError(f"components must be (num_components, {n}), got {comp.shape}")
        blocks.append(comp.T)
    else:
        blocks.append(target[:, None])
    if features is not None:
        feats = np.asarray(features, dtype=np.float64)
        if feats.ndim != 2 or feats.shape[0] != n:
            raise ValueError(f"features must be ({n}, columns), got {feats.shape}")
        blocks.append(feats)
    return np.concatenate(blocks, axis=1)


def assemble_windows(
    target: np.ndarray,
    window_length: int,
    components: np.ndarray | None = None,
    features: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Windowed samples for the single-model design.

    With `components` given (shape (num_components, n)), input channels are
    the component values followed by feature columns; otherwise the raw target
    is the first channel. Sample i covers steps [i, i + window_length) and its
    label is target[i + window_length]; a series of length n yields
    n - window_length samples. Raises TooShort when none fit.
    """
    y = np.asarray(target, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError("target must be one-dimensional")
    w = int(window_length)
    if w < 1:
        raise ValueError("window_length must be at least 1")
    n = y.shape[0]
    if n - w < 1:
        raise TooShort(f"need more than {w} points to build a window, got {n}")
    channels = _stack_channels(components, y, features, components is not None)
    num = n - w
    windows = np.empty((num, w, channels.shape[1]))
    for i in range(num):
        windows[i] = channels[i : i + w]
    return windows, y[w : w + num].copy()


def assemble_component_windows(
    components: np.ndarray,
    window_length: int,
    features: np.ndarray | None = None,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Window sets for the decomposition-ensemble design.

    One (windows, targets) pair per component: channels are that component
    (plus shared features) and the label is the component's own next value.
    Because the components sum to the series, summing per-component forecasts
    reconstructs a forecast of the raw value.
    """
    comp = np.asarray(components, dtype=np.float64)
    if comp.ndim != 2:
        raise ValueError("components must be (num_components, n)")
    out: list[tuple[np.ndarray, np.ndarray]] = []
    for k in range(comp.shape[0]):
        series_k = comp[k]
        windows, targets = assemble_windows(
            series_k, window_length, components=series_k[None, :], features=features
        )
        out.append((windows, targets))
    return out
