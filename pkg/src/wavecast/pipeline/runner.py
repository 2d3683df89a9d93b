"""End-to-end forecasting runs: fit scenarios, forecast, evaluate, report.

Fitting is strictly train-only: normalization extrema, feature scaling, and
spectral boundaries all come from the training prefix, and training windows
never cover a held-out step, so changing test values cannot change fitted
parameters. Evaluation then rolls over the test range: the h-step forecast of
test step t conditions on observed values through t - h and recurses h steps,
re-filtering the extended history with the frozen boundaries at each step and
holding feature channels at their last observed row.

Seed fan-out: every scenario label hashes (CRC-32) into a spawn key together
with the master seed, and that key yields the detector, tuning, and training
seeds, so runs are reproducible and scenario order cannot matter.
"""

from __future__ import annotations

import logging
import zlib
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import numpy as np

from ..ewt import (
    SpectralBoundaries,
    compute_boundaries,
    compute_spectrum,
    decompose_with_boundaries,
    detect_maxima,
)
from ..hyperopt import default_search_space, run_bo
from ..leaders import DetectionResult, LeaderWeights, assign_weights, detect_leaders
from ..nn import TrainedModel, predict, train
from ..series import (
    ForecastEvaluation,
    NormalizationParams,
    TimeSeries,
    apply_normalization,
    default_split,
    evaluate,
    invert_normalization,
    split,
)
from ..series import SplitSpec
from .config import PipelineConfig
from .features import FeatureTable, apply_leader_weights, normalize_columns
from .report import ForecastReport, ScenarioMetrics, build_report
from .windows import assemble_windows

__all__ = [
    "StageError",
    "PreparedData",
    "FittedScenario",
    "ScenarioResult",
    "prepare_training_data",
    "cv_objective",
    "fit_scenario",
    "evaluate_scenario",
    "run_pipeline",
    "scenario_seeds",
]

logger = logging.getLogger(__name__)


class StageError(RuntimeError):
    """A pipeline stage failed; `stage` names which one."""

    def __init__(self, stage: str, message: str) -> None:
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def _stage(stage: str, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(stage, str(exc)) from exc


def scenario_seeds(master_seed: int, label: str) -> dict[str, int]:
    """Deterministic per-scenario seeds derived from the master seed and label."""
    key = zlib.crc32(label.encode("utf-8"))
    sequence = np.random.SeedSequence([int(master_seed), int(key)])
    detector, tuning, training = (int(s) for s in sequence.generate_state(3))
    return {"detector": detector, "tuning": tuning, "training": training}


@dataclass(frozen=True)
class FittedScenario:
    """Everything produced without looking at a single held-out value."""

    label: str
    config: PipelineConfig
    seeds: Mapping[str, int]
    train_length: int
    test_length: int
    normalization: NormalizationParams
    model: TrainedModel
    boundaries: SpectralBoundaries | None = None
    detection: DetectionResult | None = None
    leader_weights: LeaderWeights | None = None
    feature_columns: tuple[str, ...] = ()
    feature_matrix: np.ndarray | None = field(default=None, repr=False)
    tuned_point: Mapping[str, Any] | None = None


@dataclass(frozen=True)
class ScenarioResult:
    """A fitted scenario plus its held-out evaluation."""

    fitted: FittedScenario
    evaluations: Mapping[int, ForecastEvaluation]
    forecasts: Mapping[int, tuple[float, ...]]
    test_periods: tuple[str, ...]


def _prepare_features(
    series: TimeSeries,
    features: FeatureTable | None,
    graph,
    config: PipelineConfig,
    train_length: int,
    detector_seed: int,
) -> tuple[tuple[str, ...], np.ndarray | None, DetectionResult | None, LeaderWeights | None]:
    if features is None or config.feature_mode == "none":
        return (), None, None, None
    if not features.aligned_with(series):
        raise ValueError("feature periods do not match the series")
    subset = features.for_mode(config.feature_mode)
    if subset is None:
        return (), None, None, None
    scaled, _ = normalize_columns(subset, fit_rows=train_length)
    detection = None
    weights = None
    if config.use_leaders and graph is not None:
        detector = replace(config.detector, seed=detector_seed)
        detection = detect_leaders(
            graph,
            trust_model=config.trust,
            game_params=config.game,
            synergy_params=config.synergy,
            config=detector,
        )
        weights = assign_weights(
            graph,
            detection.coalition,
            decay_kappa=config.decay_kappa,
            max_hops=config.max_hops,
        )
        scaled = apply_leader_weights(scaled, weights)
    return subset.columns, np.array(scaled.values), detection, weights


def _fit_boundaries(train_values: np.ndarray, config: PipelineConfig) -> SpectralBoundaries:
    spectrum = compute_spectrum(train_values)
    maxima = detect_maxima(spectrum, config.ewt)
    return compute_boundaries(maxima, config.ewt)


def _components_for(
    values: np.ndarray, boundaries: SpectralBoundaries
) -> np.ndarray:
    decomposition = decompose_with_boundaries(values, boundaries)
    return np.vstack(decomposition.components)


def cv_objective(
    windows: np.ndarray,
    targets: np.ndarray,
    config: PipelineConfig,
    input_dim: int,
    training_seed: int,
):
    """Rolling-origin cross-validation RMSE over three growing folds.

    Fold f trains on the first batch - f * block samples and scores one-step
    predictions on the following block, so every validation point lies after
    everything its model saw. Hyperparameter points may override units,
    layers, dropout_rate, mode, learning_rate, and l2_penalty.
    """
    batch = targets.shape[0]
    block = max(1, batch // 6)

    def objective(point: Mapping[str, Any]) -> float:
        spec = replace(
            config.network_spec(input_dim),
            units_per_layer=int(point.get("units", config.units_per_layer)),
            num_layers=int(point.get("layers", config.num_layers)),
            dropout_rate=float(point.get("dropout_rate", config.dropout_rate)),
            mode=str(point.get("mode", config.mode)),
        )
        training = replace(
            config.training,
            learning_rate=float(point.get("learning_rate", config.training.learning_rate)),
            l2_penalty=float(point.get("l2_penalty", config.training.l2_penalty)),
            seed=training_seed,
        )
        errors = []
        for fold in (3, 2, 1):
            fit_end = batch - fold * block
            val_end = batch - (fold - 1) * block
            model = train(windows[:fit_end], targets[:fit_end], spec, training)
            preds = predict(model.params, spec, windows[fit_end:val_end])
            errors.append(float(np.sqrt(np.mean((preds - targets[fit_end:val_end]) ** 2))))
        return float(np.mean(errors))

    return objective


@dataclass(frozen=True)
class PreparedData:
    """Training-ready arrays plus everything fitted on the training prefix."""

    label: str
    seeds: Mapping[str, int]
    train_length: int
    test_length: int
    normalization: NormalizationParams
    windows: np.ndarray = field(repr=False)
    targets: np.ndarray = field(repr=False)
    input_dim: int = 1
    boundaries: SpectralBoundaries | None = None
    detection: DetectionResult | None = None
    leader_weights: LeaderWeights | None = None
    feature_columns: tuple[str, ...] = ()
    feature_matrix: np.ndarray | None = field(default=None, repr=False)


def prepare_training_data(
    label: str,
    series: TimeSeries,
    config: PipelineConfig,
    features: FeatureTable | None = None,
    graph=None,
    master_seed: int | None = None,
) -> PreparedData:
    """Run every pre-training stage using only the training prefix."""
    seeds = scenario_seeds(config.seed if master_seed is None else master_seed, label)

    spec_split = (
        SplitSpec(config.test_length)
        if config.test_length is not None
        else default_split(len(series))
    )
    train_series, test_series = _stage("split", split, series, spec_split)
    train_length = len(train_series)

    def normalize_train():
        x_min = float(train_series.values.min())
        x_max = float(train_series.values.max())
        if x_min == x_max:
            raise ValueError("training values are constant; scaling is undefined")
        params = NormalizationParams(x_min, x_max, config.x_low, config.x_high)
        return params, apply_normalization(train_series.values, params)

    normalization, normalized_train = _stage("normalize", normalize_train)

    feature_columns, feature_matrix, detection, weights = _stage(
        "leaders",
        _prepare_features,
        series,
        features,
        graph,
        config,
        train_length,
        seeds["detector"],
    )

    boundaries = None
    components = None
    if config.use_ewt:
        boundaries = _stage("decompose", _fit_boundaries, normalized_train, config)
        components = _stage("decompose", _components_for, normalized_train, boundaries)

    train_features = (
        feature_matrix[:train_length] if feature_matrix is not None else None
    )
    windows, targets = _stage(
        "windows",
        assemble_windows,
        normalized_train,
        config.window_length,
        components,
        train_features,
    )
    return PreparedData(
        label=label,
        seeds=seeds,
        train_length=train_length,
        test_length=len(test_series),
        normalization=normalization,
        windows=windows,
        targets=targets,
        input_dim=int(windows.shape[2]),
        boundaries=boundaries,
        detection=detection,
        leader_weights=weights,
        feature_columns=feature_columns,
        feature_matrix=feature_matrix,
    )


def fit_scenario(
    label: str,
    series: TimeSeries,
    config: PipelineConfig,
    features: FeatureTable | None = None,
    graph=None,
    master_seed: int | None = None,
) -> FittedScenario:
    """Fit one scenario using only the training prefix of the series."""
    data = prepare_training_data(
        label, series, config, features=features, graph=graph, master_seed=master_seed
    )
    tuned_point = None
    spec = config.network_spec(data.input_dim)
    training = replace(config.training, seed=data.seeds["training"])
    if config.bo_budget is not None:
        objective = cv_objective(
            data.windows, data.targets, config, data.input_dim, data.seeds["training"]
        )
        history = _stage(
            "tune",
            run_bo,
            objective,
            default_search_space(),
            config.bo_budget,
            config.bo_init,
            data.seeds["tuning"],
        )
        tuned_point = history.best_point
        spec = replace(
            spec,
            units_per_layer=int(tuned_point["units"]),
            num_layers=int(tuned_point["layers"]),
            dropout_rate=float(tuned_point["dropout_rate"]),
            mode=str(tuned_point["mode"]),
        )
        training = replace(
            training,
            learning_rate=float(tuned_point["learning_rate"]),
            l2_penalty=float(tuned_point["l2_penalty"]),
        )

    model = _stage("train", train, data.windows, data.targets, spec, training)
    return FittedScenario(
        label=label,
        config=config,
        seeds=data.seeds,
        train_length=data.train_length,
        test_length=data.test_length,
        normalization=data.normalization,
        model=model,
        boundaries=data.boundaries,
        detection=data.detection,
        leader_weights=data.leader_weights,
        feature_columns=data.feature_columns,
        feature_matrix=data.feature_matrix,
        tuned_point=tuned_point,
    )


def _rolled_forecast(
    fitted: FittedScenario,
    normalized_values: np.ndarray,
    origin: int,
    horizon: int,
) -> float:
    """Recursive h-step forecast conditioning on values through `origin`."""
    config = fitted.config
    w = config.window_length
    history = np.array(normalized_values[: origin + 1])
    feats = fitted.feature_matrix
    for _ in range(horizon):
        length = history.shape[0]
        if config.use_ewt:
            channels = _components_for(history, fitted.boundaries).T
        else:
            channels = history[:, None]
        if feats is not None:
            observed = feats[: min(length, origin + 1)]
            if length > origin + 1:
                frozen = np.repeat(feats[origin : origin + 1], length - origin - 1, axis=0)
                rows = np.vstack([observed, frozen])
            else:
                rows = observed
            channels = np.concatenate([channels, rows], axis=1)
        window = channels[length - w : length]
        value = float(predict(fitted.model.params, fitted.model.spec, window[None])[0])
        history = np.append(history, value)
    return float(history[-1])


def evaluate_scenario(
    fitted: FittedScenario,
    series: TimeSeries,
    horizons: tuple[int, ...] | None = None,
) -> ScenarioResult:
    """Score a fitted scenario on the held-out range of the full series."""
    config = fitted.config
    horizons = config.horizons if horizons is None else tuple(horizons)
    n = len(series)
    train_length = fitted.train_length
    test_length = n - train_length
    if test_length != fitted.test_length:
        raise StageError("evaluate", "series length changed since fitting")
    normalized = apply_normalization(series.values, fitted.normalization)
    test_values = series.values[train_length:]
    labels = series.labels[train_length:]

    evaluations: dict[int, ForecastEvaluation] = {}
    forecasts: dict[int, tuple[float, ...]] = {}
    for horizon in horizons:
        if horizon > train_length:
            raise StageError(
                "forecast", f"horizon {horizon} exceeds the training length"
            )
        predicted_norm = np.empty(test_length)
        for j in range(test_length):
            origin = train_length + j - horizon
            predicted_norm[j] = _stage(
                "forecast", _rolled_forecast, fitted, normalized, origin, horizon
            )
        predicted = invert_normalization(predicted_norm, fitted.normalization)
        evaluations[horizon] = _stage("evaluate", evaluate, test_values, predicted)
        forecasts[horizon] = tuple(float(v) for v in predicted)
    return ScenarioResult(
        fitted=fitted,
        evaluations=evaluations,
        forecasts=forecasts,
        test_periods=tuple(labels),
    )


def _default_scenarios(config: PipelineConfig) -> dict[str, PipelineConfig]:
    baseline = replace(
        config, use_ewt=False, use_leaders=False, feature_mode="none"
    )
    return {"configured": config, "baseline": baseline}


def run_pipeline(
    series: TimeSeries,
    config: PipelineConfig,
    features: FeatureTable | None = None,
    graph=None,
    scenarios: Mapping[str, PipelineConfig] | None = None,
) -> ForecastReport:
    """Fit and evaluate every scenario, then assemble the comparison report.

    Without an explicit scenario map, the configured model is compared against
    the pure historical baseline (no decomposition, no features, no leader
    weighting). All scenarios share the master seed; per-scenario seeds come
    from hashing the label, so adding or reordering scenarios never changes
    another scenario's result.
    """
    if scenarios is None:
        scenarios = _default_scenarios(config)
    if not scenarios:
        raise ValueError("need at least one scenario")
    results: list[ScenarioResult] = []
    for label in sorted(scenarios):
        scenario_config = scenarios[label]
        logger.info("running scenario %r", label)
        fitted = fit_scenario(
            label,
            series,
            scenario_config,
            features=features,
            graph=graph,
            master_seed=config.seed,
        )
        results.append(evaluate_scenario(fitted, series))

    metrics = []
    for result in results:
        fitted = result.fitted
        metrics.append(
            ScenarioMetrics(
                label=fitted.label,
                horizons=tuple(sorted(result.evaluations)),
                metrics={
                    h: {
                        "mape": result.evaluations[h].mape,
                        "rmse": result.evaluations[h].rmse,
                        "rmsre": result.evaluations[h].rmsre,
                    }
                    for h in result.evaluations
                },
                forecasts={h: result.forecasts[h] for h in result.forecasts},
                test_periods=result.test_periods,
                flags={
                    "feature_mode": fitted.config.feature_mode,
                    "use_ewt": fitted.config.use_ewt,
                    "use_leaders": fitted.config.use_leaders,
                    "window_length": fitted.config.window_length,
                    "mode": fitted.model.spec.mode,
                    "units_per_layer": fitted.model.spec.units_per_layer,
                    "num_layers": fitted.model.spec.num_layers,
                    "seeds": dict(fitted.seeds),
                    "coalition": (
                        list(fitted.detection.coalition.members)
                        if fitted.detection is not None
                        else None
                    ),
                    "tuned": dict(fitted.tuned_point) if fitted.tuned_point else None,
                },
            )
        )
    metadata = {
        "series_name": series.name,
        "series_length": len(series),
        "train_length": results[0].fitted.train_length,
        "test_length": results[0].fitted.test_length,
        "master_seed": config.seed,
        "horizons": list(config.horizons),
        "feature_columns": list(features.columns) if features is not None else [],
    }
    return _stage("report", build_report, metrics, metadata)
