"""Sequential model-based optimization with an exploration-reinforced
expected-improvement rule.

Candidates come from a scrambled Sobol sequence snapped onto the space, the
best one is polished by a shrinking coordinate search, and whenever the winner
looks like pure noise-level exploitation the surrogate's output variance is
escalated so the next pick explores more.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np
from scipy.special import ndtr
from scipy.stats import qmc

from .gp import GpSurrogate, gp_fit, gp_posterior, with_output_var
from .space import SearchSpace

__all__ = [
    "AcquisitionConfig",
    "BoEntry",
    "BoHistory",
    "expected_improvement_plus",
    "propose_next",
    "run_bo",
]

logger = logging.getLogger(__name__)

_REFINEMENT_STEPS = (0.25, 0.1, 0.04, 0.015, 0.005)
_FAILURE_FALLBACK = 1e6


@dataclass(frozen=True)
class AcquisitionConfig:
    """Knobs of the acquisition step.

    `xi` is the improvement margin; a winning candidate whose posterior
    standard deviation falls below `exploit_threshold * sqrt(noise_var)` is
    treated as noise-chasing, and the surrogate's output variance is multiplied
    by `escalation_factor` (at most `max_escalations` times) before re-picking.
    """

    xi: float = 0.01
    exploit_threshold: float = 0.5
    escalation_factor: float = 2.0
    max_escalations: int = 5
    candidate_pool: int = 2000

    def __post_init__(self) -> None:
        if not float(self.xi) >= 0.0:
            raise ValueError("xi must be non-negative")
        if not float(self.exploit_threshold) > 0.0:
            raise ValueError("exploit_threshold must be positive")
        if not float(self.escalation_factor) > 1.0:
            raise ValueError("escalation_factor must exceed 1")
        if int(self.max_escalations) < 0:
            raise ValueError("max_escalations must be non-negative")
        if int(self.candidate_pool) < 1:
            raise ValueError("candidate_pool must be positive")


def expected_improvement_plus(
    mean: np.ndarray,
    sd: np.ndarray,
    incumbent: float,
    xi: float = 0.01,
) -> np.ndarray:
    """Expected improvement below the incumbent, shifted by the margin xi.

    With g = incumbent - mean - xi and u = g / sd, the value is
    g * Phi(u) + sd * phi(u); degenerate points (sd ~ 0) contribute max(g, 0).
    Always non-negative.
    """
    mean = np.asarray(mean, dtype=np.float64)
    sd = np.asarray(sd, dtype=np.float64)
    g = incumbent - mean - xi
    out = np.maximum(g, 0.0)
    active = sd > 1e-15
    if np.any(active):
        u = g[active] / sd[active]
        pdf = np.exp(-0.5 * u**2) / np.sqrt(2.0 * np.pi)
        out = out.copy() if out.base is not None else out
        values = g[active] * ndtr(u) + sd[active] * pdf
        out[active] = np.maximum(values, 0.0)
    return out


def _acquisition(
    surrogate: GpSurrogate, candidates: np.ndarray, xi: float
) -> np.ndarray:
    mean, var = gp_posterior(surrogate, candidates)
    return expected_improvement_plus(
        mean, np.sqrt(var), surrogate.incumbent_loss, xi
    )


def _sobol_unit(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """`count` scrambled Sobol points; drawn as the next power of two then cut."""
    sampler = qmc.Sobol(d=dim, scramble=True, seed=rng)
    pow2 = 1
    while pow2 < count:
        pow2 *= 2
    return sampler.random(pow2)[:count]


def _refine(
    surrogate: GpSurrogate,
    space: SearchSpace,
    start: np.ndarray,
    start_value: float,
    xi: float,
) -> tuple[np.ndarray, float]:
    best, best_value = start, start_value
    for step in _REFINEMENT_STEPS:
        moved = True
        while moved:
            moved = False
            for idx in range(best.shape[0]):
                for delta in (step, -step):
                    trial = best.copy()
                    trial[idx] = min(1.0, max(0.0, trial[idx] + delta))
                    trial = space.snap(trial)
                    value = float(_acquisition(surrogate, trial[None], xi)[0])
                    if value > best_value + 1e-15:
                        best, best_value = trial, value
                        moved = True
    return best, best_value


def propose_next(
    surrogate: GpSurrogate,
    space: SearchSpace,
    config: AcquisitionConfig | None = None,
    seed: int = 0,
) -> dict[str, Any]:
    """Pick the next point to evaluate.

    Snapped Sobol candidates are scored under the acquisition rule, the argmax
    (first index on ties) is polished by a shrinking coordinate search, and the
    noise-exploitation escalation re-picks with an inflated output variance
    when triggered. Deterministic for a fixed surrogate, space, and seed.
    """
    if config is None:
        config = AcquisitionConfig()
    rng = np.random.default_rng(seed)
    raw = _sobol_unit(space.encoded_dim, config.candidate_pool, rng)
    candidates = np.array([space.snap(row) for row in raw])
    noise_sd = float(np.sqrt(surrogate.noise_var))
    working = surrogate
    escalations = 0
    while True:
        values = _acquisition(working, candidates, config.xi)
        idx = int(np.argmax(values))
        best, best_value = _refine(
            working, space, candidates[idx].copy(), float(values[idx]), config.xi
        )
        _, var = gp_posterior(working, best)
        sd = float(np.sqrt(var))
        if (
            noise_sd > 0.0
            and sd < config.exploit_threshold * noise_sd
            and escalations < config.max_escalations
        ):
            escalations += 1
            working = with_output_var(
                working, working.output_var * config.escalation_factor
            )
            logger.debug(
                "escalating output variance to %.3g (round %d)",
                working.output_var,
                escalations,
            )
            continue
        return space.decode(best)


@dataclass(frozen=True)
class BoEntry:
    """One evaluated point with the incumbent after it."""

    iteration: int
    point: dict[str, Any]
    loss: float
    incumbent_loss: float
    incumbent_point: dict[str, Any]


@dataclass(frozen=True)
class BoHistory:
    """Complete evaluation record of one optimization run."""

    entries: tuple[BoEntry, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        losses = [e.incumbent_loss for e in self.entries]
        if any(b > a + 1e-15 for a, b in zip(losses, losses[1:])):
            raise ValueError("incumbent loss must be non-increasing")

    @property
    def best_loss(self) -> float:
        if not self.entries:
            raise ValueError("empty history")
        return self.entries[-1].incumbent_loss

    @property
    def best_point(self) -> dict[str, Any]:
        if not self.entries:
            raise ValueError("empty history")
        return dict(self.entries[-1].incumbent_point)


def run_bo(
    objective: Callable[[Mapping[str, Any]], float],
    space: SearchSpace,
    budget: int,
    init_design_size: int | None = None,
    seed: int = 0,
    acquisition: AcquisitionConfig | None = None,
) -> BoHistory:
    """Minimize a black-box objective within an evaluation budget.

    The first `init_design_size` evaluations come from a scrambled Sobol design
    (default max(5, budget // 4), capped at the budget); the rest are picked by
    the surrogate. Evaluations that raise or return non-finite values are
    recorded at ten times the worst finite loss seen so far (a large constant
    if none exists yet) so the search continues. Iteration k draws its
    randomness from the spawn key (seed, k), making runs reproducible.
    """
    if acquisition is None:
        acquisition = AcquisitionConfig()
    budget = int(budget)
    if budget < 2:
        raise ValueError("budget must be at least 2")
    if init_design_size is None:
        init_design_size = min(max(5, budget // 4), budget)
    init_design_size = int(init_design_size)
    if not 2 <= init_design_size <= budget:
        raise ValueError("need budget >= init_design_size >= 2")

    def evaluate(point: Mapping[str, Any], finite_losses: list[float]) -> float:
        try:
            value = float(objective(point))
        except Exception as exc:  # noqa: BLE001 - a failed trial must not kill the run
            logger.warning("objective failed at %s: %s", point, exc)
            value = np.nan
        if not np.isfinite(value):
            worst = max(finite_losses) if finite_losses else None
            value = 10.0 * worst if worst is not None and worst > 0 else _FAILURE_FALLBACK
            logger.warning("recording failed evaluation as %.3g", value)
        return value

    entries: list[BoEntry] = []
    encoded: list[np.ndarray] = []
    losses: list[float] = []
    finite_losses: list[float] = []
    incumbent_loss = np.inf
    incumbent_point: dict[str, Any] = {}

    init_rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    design = _sobol_unit(space.encoded_dim, init_design_size, init_rng)
    for iteration in range(budget):
        if iteration < init_design_size:
            point = space.decode(design[iteration])
        else:
            surrogate = gp_fit(np.array(encoded), np.array(losses))
            iter_seed = np.random.SeedSequence([seed, iteration])
            point = propose_next(
                surrogate,
                space,
                acquisition,
                seed=iter_seed.generate_state(1)[0],
            )
        loss_value = evaluate(point, finite_losses)
        finite_losses.append(loss_value)
        encoded.append(space.encode(point))
        losses.append(loss_value)
        if loss_value < incumbent_loss:
            incumbent_loss = loss_value
            incumbent_point = dict(point)
        entries.append(
            BoEntry(
                iteration=iteration,
                point=dict(point),
                loss=loss_value,
                incumbent_loss=incumbent_loss,
                incumbent_point=dict(incumbent_point),
            )
        )
    return BoHistory(entries=tuple(entries))
