"""Gaussian-process surrogate with a Matérn-5/2 kernel and per-dimension
length scales.

Losses are standardized internally; posteriors are reported back in raw loss
units. Hyperparameters (length scales, output variance, noise variance) are
chosen by maximizing the log marginal likelihood with a multi-start coordinate
search, so no gradient machinery is needed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

__all__ = [
    "SingularKernel",
    "GpSurrogate",
    "matern52",
    "make_surrogate",
    "gp_fit",
    "gp_posterior",
    "log_marginal_likelihood",
    "with_output_var",
]

logger = logging.getLogger(__name__)

_JITTERS = (0.0, 1e-12, 1e-10, 1e-8, 1e-6)
_LS_BOUNDS = (1e-3, 1e3)
_OV_BOUNDS = (1e-6, 1e3)
_NV_FLOOR = 1e-10


class SingularKernel(RuntimeError):
    """The kernel matrix stayed non-positive-definite through every jitter."""


def matern52(
    x1: np.ndarray,
    x2: np.ndarray,
    length_scales: np.ndarray,
    output_var: float,
) -> np.ndarray:
    """Matérn-5/2 covariance between two point sets (rows are points)."""
    a = np.atleast_2d(np.asarray(x1, dtype=np.float64))
    b = np.atleast_2d(np.asarray(x2, dtype=np.float64))
    ls = np.asarray(length_scales, dtype=np.float64).reshape(-1)
    if a.shape[1] != b.shape[1] or a.shape[1] != ls.shape[0]:
        raise ValueError("point sets and length scales disagree on dimension")
    diff = (a[:, None, :] - b[None, :, :]) / ls
    r2 = np.sum(diff**2, axis=2)
    r = np.sqrt(np.maximum(r2, 0.0))
    sq5r = np.sqrt(5.0) * r
    return output_var * (1.0 + sq5r + 5.0 * r2 / 3.0) * np.exp(-sq5r)


def _chol_with_jitter(kernel: np.ndarray) -> tuple[np.ndarray, float]:
    for jitter in _JITTERS:
        try:
            shifted = kernel if jitter == 0.0 else kernel + jitter * np.eye(kernel.shape[0])
            return cholesky(shifted, lower=True), jitter
        except np.linalg.LinAlgError:
            continue
        except ValueError:
            continue
    raise SingularKernel(
        f"kernel matrix of size {kernel.shape[0]} is singular even with jitter {_JITTERS[-1]}"
    )


@dataclass(frozen=True)
class GpSurrogate:
    """Fitted surrogate: training data, kernel hyperparameters, factorization.

    `losses` stay in raw units; `loss_mean`/`loss_scale` record the internal
    standardization. `chol` factorizes K + noise_var * I over the standardized
    targets and `alpha` solves (K + noise_var I) alpha = y_standardized.
    """

    x: np.ndarray
    losses: np.ndarray
    length_scales: np.ndarray
    output_var: float
    noise_var: float
    loss_mean: float
    loss_scale: float
    chol: np.ndarray
    alpha: np.ndarray
    jitter: float
    log_marginal: float

    @property
    def num_observations(self) -> int:
        return self.x.shape[0]

    @property
    def incumbent_loss(self) -> float:
        return float(np.min(self.losses))

    @property
    def incumbent_point_encoded(self) -> np.ndarray:
        return self.x[int(np.argmin(self.losses))].copy()


def _standardize(losses: np.ndarray) -> tuple[np.ndarray, float, float]:
    mean = float(np.mean(losses))
    scale = float(np.std(losses))
    if not scale > 1e-12:
        scale = 1.0
    return (losses - mean) / scale, mean, scale


def log_marginal_likelihood(
    x: np.ndarray,
    y_standardized: np.ndarray,
    length_scales: np.ndarray,
    output_var: float,
    noise_var: float,
) -> float:
    """Gaussian log marginal likelihood of standardized targets."""
    n = x.shape[0]
    kernel = matern52(x, x, length_scales, output_var) + noise_var * np.eye(n)
    try:
        chol, _ = _chol_with_jitter(kernel)
    except SingularKernel:
        return -np.inf
    alpha = cho_solve((chol, True), y_standardized)
    return float(
        -0.5 * y_standardized @ alpha
        - np.sum(np.log(np.diag(chol)))
        - 0.5 * n * np.log(2.0 * np.pi)
    )


def make_surrogate(
    x: np.ndarray,
    losses: np.ndarray,
    length_scales,
    output_var: float,
    noise_var: float,
) -> GpSurrogate:
    """Build a surrogate with the given kernel hyperparameters (no fitting)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    losses = np.asarray(losses, dtype=np.float64).reshape(-1)
    if x.shape[0] != losses.shape[0]:
        raise ValueError("x and losses must have the same number of rows")
    if x.shape[0] < 1:
        raise ValueError("need at least one observation")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(losses)):
        raise ValueError("observations must be finite")
    ls = np.broadcast_to(
        np.asarray(length_scales, dtype=np.float64).reshape(-1), (x.shape[1],)
    ).copy() if np.ndim(length_scales) else np.full(x.shape[1], float(length_scales))
    if ls.shape != (x.shape[1],):
        raise ValueError("length_scales must broadcast to the encoded dimension")
    if np.any(ls <= 0.0) or output_var <= 0.0 or noise_var < 0.0:
        raise ValueError("length scales and output_var must be positive, noise_var >= 0")
    y_std, mean, scale = _standardize(losses)
    kernel = matern52(x, x, ls, output_var) + noise_var * np.eye(x.shape[0])
    chol, jitter = _chol_with_jitter(kernel)
    alpha = cho_solve((chol, True), y_std)
    lml = float(
        -0.5 * y_std @ alpha
        - np.sum(np.log(np.diag(chol)))
        - 0.5 * x.shape[0] * np.log(2.0 * np.pi)
    )
    return GpSurrogate(
        x=x,
        losses=losses,
        length_scales=ls,
        output_var=float(output_var),
        noise_var=float(noise_var),
        loss_mean=mean,
        loss_scale=scale,
        chol=chol,
        alpha=alpha,
        jitter=jitter,
        log_marginal=lml,
    )


_DEFAULT_START = {"ls": 1.0, "ov": 1.0, "nv": 1e-4}
_EXTRA_STARTS = (
    {"ls": 0.3, "ov": 1.0, "nv": 1e-4},
    {"ls": 3.0, "ov": 1.0, "nv": 1e-4},
    {"ls": 1.0, "ov": 0.3, "nv": 1e-2},
    {"ls": 0.5, "ov": 2.0, "nv": 1e-6},
)


def gp_fit(x: np.ndarray, losses: np.ndarray) -> GpSurrogate:
    """Fit kernel hyperparameters by maximizing the log marginal likelihood.

    Multi-start coordinate search in log space: from each start, every
    coordinate tries a +/- step of 0.5 log units, the step halves after a sweep
    without improvement, and the search stops below 1e-3. The default start is
    always included, so the fitted likelihood can never fall below that
    baseline.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    losses = np.asarray(losses, dtype=np.float64).reshape(-1)
    if x.shape[0] != losses.shape[0]:
        raise ValueError("x and losses must have the same number of rows")
    if x.shape[0] < 1:
        raise ValueError("need at least one observation")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(losses)):
        raise ValueError("observations must be finite")
    d = x.shape[1]
    y_std, _, _ = _standardize(losses)

    lo = np.log(np.array([_LS_BOUNDS[0]] * d + [_OV_BOUNDS[0], _NV_FLOOR]))
    hi = np.log(np.array([_LS_BOUNDS[1]] * d + [_OV_BOUNDS[1], 1e2]))

    def objective(theta: np.ndarray) -> float:
        ls = np.exp(theta[:d])
        ov = float(np.exp(theta[d]))
        nv = float(np.exp(theta[d + 1]))
        return log_marginal_likelihood(x, y_std, ls, ov, nv)

    best_theta = None
    best_value = -np.inf
    for start in (_DEFAULT_START,) + _EXTRA_STARTS:
        theta = np.log(
            np.array([start["ls"]] * d + [start["ov"], max(start["nv"], _NV_FLOOR)])
        )
        theta = np.clip(theta, lo, hi)
        value = objective(theta)
        step = 0.5
        for _ in range(50):
            improved = False
            for idx in range(theta.shape[0]):
                for delta in (step, -step):
                    trial = theta.copy()
                    trial[idx] = np.clip(trial[idx] + delta, lo[idx], hi[idx])
                    trial_value = objective(trial)
                    if trial_value > value:
                        theta, value = trial, trial_value
                        improved = True
            if not improved:
                step *= 0.5
                if step < 1e-3:
                    break
        if value > best_value:
            best_value, best_theta = value, theta
    if best_theta is None or not np.isfinite(best_value):
        raise SingularKernel("no hyperparameter setting produced a usable kernel")
    return make_surrogate(
        x,
        losses,
        np.exp(best_theta[:d]),
        float(np.exp(best_theta[d])),
        float(np.exp(best_theta[d + 1])),
    )


def gp_posterior(
    surrogate: GpSurrogate, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance at query points, in raw loss units.

    Accepts one encoded point (d,) or a stack (m, d); returns arrays of the
    matching leading shape. Variances are clipped at zero.
    """
    pts = np.asarray(points, dtype=np.float64)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != surrogate.x.shape[1]:
        raise ValueError(
            f"query dimension {pts.shape[1]} != training dimension {surrogate.x.shape[1]}"
        )
    k_star = matern52(surrogate.x, pts, surrogate.length_scales, surrogate.output_var)
    mean_std = k_star.T @ surrogate.alpha
    v = solve_triangular(surrogate.chol, k_star, lower=True)
    var_std = np.maximum(surrogate.output_var - np.sum(v**2, axis=0), 0.0)
    mean = surrogate.loss_mean + surrogate.loss_scale * mean_std
    var = surrogate.loss_scale**2 * var_std
    if single:
        return mean[0], var[0]
    return mean, var


def with_output_var(surrogate: GpSurrogate, output_var: float) -> GpSurrogate:
    """Rebuild the surrogate with a different output variance, same data."""
    return make_surrogate(
        surrogate.x,
        surrogate.losses,
        surrogate.length_scales,
        output_var,
        surrogate.noise_var,
    )
