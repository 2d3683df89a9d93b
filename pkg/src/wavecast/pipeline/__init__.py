"""End-to-end forecasting pipeline: data bundles, features, windows, runs."""

from .bundle import (
    AlignmentError,
    Bundle,
    load_bundle,
    read_feature_csv,
    read_graph_csv,
    resample_to_monthly,
    write_feature_csv,
    write_graph_csv,
)
from .config import PipelineConfig, build_config, config_to_ini, load_pipeline_config
from .features import (
    FEATURE_MODES,
    VALENCE_FEATURES,
    VOLUME_FEATURES,
    FeatureTable,
    apply_leader_weights,
    columns_for_mode,
    feature_kind,
    normalize_columns,
)
from .report import (
    ForecastReport,
    ImprovementRow,
    IoError,
    ScenarioMetrics,
    build_report,
    compute_improvements,
    emit_report,
    read_metrics_csv,
    read_report,
)
from .runner import (
    FittedScenario,
    PreparedData,
    ScenarioResult,
    StageError,
    cv_objective,
    evaluate_scenario,
    fit_scenario,
    prepare_training_data,
    run_pipeline,
    scenario_seeds,
)
from .synthetic import (
    SyntheticScenario,
    SyntheticSpec,
    generate_scenario,
    generate_series,
    tone_signal,
    write_scenario,
)
from .windows import TooShort, assemble_component_windows, assemble_windows

__all__ = [
    "AlignmentError",
    "Bundle",
    "FEATURE_MODES",
    "FeatureTable",
    "FittedScenario",
    "ForecastReport",
    "ImprovementRow",
    "IoError",
    "PipelineConfig",
    "PreparedData",
    "ScenarioMetrics",
    "ScenarioResult",
    "StageError",
    "SyntheticScenario",
    "SyntheticSpec",
    "TooShort",
    "VALENCE_FEATURES",
    "VOLUME_FEATURES",
    "apply_leader_weights",
    "assemble_component_windows",
    "assemble_windows",
    "build_config",
    "build_report",
    "columns_for_mode",
    "compute_improvements",
    "config_to_ini",
    "cv_objective",
    "emit_report",
    "evaluate_scenario",
    "feature_kind",
    "fit_scenario",
    "generate_scenario",
    "generate_series",
    "load_bundle",
    "load_pipeline_config",
    "normalize_columns",
    "prepare_training_data",
    "read_feature_csv",
    "read_graph_csv",
    "read_metrics_csv",
    "read_report",
    "resample_to_monthly",
    "run_pipeline",
    "scenario_seeds",
    "tone_signal",
    "write_feature_csv",
    "write_graph_csv",
    "write_scenario",
]
