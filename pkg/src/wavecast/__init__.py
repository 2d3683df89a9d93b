"""Hybrid tourism-demand forecasting.

The package combines four stages, each usable on its own:

- :mod:`wavecast.series` — time-series containers, metrics, normalization, CSV I/O
- :mod:`wavecast.ewt` — empirical wavelet decomposition into spectral components
- :mod:`wavecast.leaders` — game-theoretic opinion-leader detection on social graphs
- :mod:`wavecast.nn` — stacked (bidirectional) LSTM forecaster trained from scratch
- :mod:`wavecast.hyperopt` — Gaussian-process Bayesian hyperparameter search
- :mod:`wavecast.pipeline` — end-to-end orchestration, synthetic data, reports
"""

__version__ = "0.1.0"

from .series import (
    Frequency,
    TimeSeries,
    NormalizationParams,
    ForecastEvaluation,
    SplitSpec,
    apply_normalization,
    invert_normalization,
    evaluate,
    improvement_pct,
    split,
    default_split,
    read_series_csv,
    write_series_csv,
)
from .ewt import EwtConfig, EwtDecomposition, SpectralBoundaries, decompose, reconstruct
from .leaders import (
    SocialGraph,
    NodeAttributes,
    TrustModel,
    GameParams,
    SynergyParams,
    SearchConfig,
    DetectionResult,
    LeaderWeights,
    detect_leaders,
    assign_weights,
)
from .nn import (
    NetworkSpec,
    TrainingConfig,
    TrainedModel,
    train,
    predict,
    predict_multi_step,
    save_checkpoint,
    load_checkpoint,
)
from .hyperopt import SearchSpace, Dimension, default_search_space, run_bo
from .pipeline import (
    PipelineConfig,
    SyntheticSpec,
    generate_scenario,
    load_bundle,
    run_pipeline,
    emit_report,
)

__all__ = [
    "__version__",
    "Frequency",
    "TimeSeries",
    "NormalizationParams",
    "ForecastEvaluation",
    "SplitSpec",
    "apply_normalization",
    "invert_normalization",
    "evaluate",
    "improvement_pct",
    "split",
    "default_split",
    "read_series_csv",
    "write_series_csv",
    "EwtConfig",
    "EwtDecomposition",
    "SpectralBoundaries",
    "decompose",
    "reconstruct",
    "SocialGraph",
    "NodeAttributes",
    "TrustModel",
    "GameParams",
    "SynergyParams",
    "SearchConfig",
    "DetectionResult",
    "LeaderWeights",
    "detect_leaders",
    "assign_weights",
    "NetworkSpec",
    "TrainingConfig",
    "TrainedModel",
    "train",
    "predict",
    "predict_multi_step",
    "save_checkpoint",
    "load_checkpoint",
    "SearchSpace",
    "Dimension",
    "default_search_space",
    "run_bo",
    "PipelineConfig",
    "SyntheticSpec",
    "generate_scenario",
    "load_bundle",
    "run_pipeline",
    "emit_report",
]
