"""Command-line interface.

Subcommands mirror the pipeline stages:

    simulate        generate a seeded synthetic world (series, features, graph)
    decompose       split a series into spectral components (plot-ready CSV)
    detect-leaders  find the opinion-leader coalition in a social graph
    tune            Bayesian hyperparameter search over the forecaster
    train           fit a forecaster and save a reusable checkpoint
    forecast        roll a saved model forward past the end of a series
    evaluate        score a predicted series against an observed one
    report          re-emit the artifacts of a saved report document
    run             full pipeline: fit, compare scenarios, emit the report
"""

from __future__ import annotations

import argparse
import json
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .ewt import (
    SpectralBoundaries,
    compute_boundaries,
    compute_spectrum,
    decompose_with_boundaries,
    detect_maxima,
)
from .hyperopt import Dimension, SearchSpace, default_search_space, run_bo
from .leaders import assign_weights, detect_leaders
from .nn import load_checkpoint, save_checkpoint
from .series import (
    NormalizationParams,
    add_periods,
    apply_normalization,
    evaluate,
    format_period,
    invert_normalization,
    read_series_csv,
)
from .pipeline import (
    FittedScenario,
    PipelineConfig,
    SyntheticSpec,
    cv_objective,
    emit_report,
    evaluate_scenario,
    fit_scenario,
    generate_scenario,
    load_bundle,
    load_pipeline_config,
    prepare_training_data,
    read_report,
    run_pipeline,
    scenario_seeds,
    write_scenario,
)
from .pipeline.config import config_to_ini
from .pipeline.runner import _rolled_forecast

logger = logging.getLogger("wavecast")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavecast",
        description="Hybrid demand forecasting: spectral decomposition, "
        "opinion-leader weighting, recurrent forecaster, Bayesian tuning.",
    )
    parser.add_argument("--version", action="version", version=f"wavecast {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, out_required: bool = True) -> None:
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--config", type=Path, default=None, help="INI config file")
        p.add_argument(
            "--out", type=Path, required=out_required, help="output directory"
        )

    p = sub.add_parser("simulate", help="generate a synthetic world")
    common(p)
    p.add_argument("--length", type=int, default=120)
    p.add_argument("--graph-size", type=int, default=20)
    p.add_argument("--coalition-size", type=int, default=3)
    p.add_argument("--coupling", type=float, default=40.0)
    p.add_argument("--noise-sd", type=float, default=5.0)
    p.add_argument("--trend", type=float, default=1.0)
    p.add_argument("--seasonal-amplitude", type=float, default=60.0)
    p.add_argument("--base-level", type=float, default=500.0)

    p = sub.add_parser("decompose", help="spectral decomposition of a series")
    common(p)
    p.add_argument("--series", type=Path, required=True)
    p.add_argument("--components", default="auto", help="count or 'auto'")
    p.add_argument("--gamma", default="auto", help="transition ratio or 'auto'")
    p.add_argument("--prominence", type=float, default=None)

    p = sub.add_parser("detect-leaders", help="opinion-leader coalition detection")
    common(p)
    p.add_argument("--nodes", type=Path, required=True)
    p.add_argument("--edges", type=Path, required=True)

    p = sub.add_parser("tune", help="Bayesian hyperparameter search")
    common(p)
    p.add_argument("--series", type=Path, required=True)
    p.add_argument("--features", type=Path, default=None)
    p.add_argument("--contributors", type=Path, default=None)
    p.add_argument("--nodes", type=Path, default=None)
    p.add_argument("--edges", type=Path, default=None)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--init", type=int, default=None, help="initial design size")
    p.add_argument(
        "--dim",
        action="append",
        default=[],
        metavar="NAME=LOW:HIGH | NAME=A,B,..",
        help="override a search dimension's bounds or categories (repeatable)",
    )

    p = sub.add_parser("train", help="fit a forecaster, save fit state + checkpoint")
    common(p)
    p.add_argument("--series", type=Path, required=True)
    p.add_argument("--features", type=Path, default=None)
    p.add_argument("--contributors", type=Path, default=None)
    p.add_argument("--nodes", type=Path, default=None)
    p.add_argument("--edges", type=Path, default=None)
    p.add_argument(
        "--best-config", type=Path, default=None, help="best_config.json from tune"
    )

    p = sub.add_parser("forecast", help="forecast past the end of a series")
    common(p)
    p.add_argument("--fit-dir", type=Path, required=True, help="directory from train")
    p.add_argument("--series", type=Path, required=True)
    p.add_argument("--horizons", default="1,2,3")

    p = sub.add_parser("evaluate", help="score predictions against observations")
    common(p, out_required=False)
    p.add_argument("--observed", type=Path, required=True)
    p.add_argument("--predicted", type=Path, required=True)

    p = sub.add_parser("report", help="re-emit artifacts from a report document")
    common(p)
    p.add_argument("--report", type=Path, required=True, help="report.json path")

    p = sub.add_parser("run", help="full pipeline with scenario comparison")
    common(p)
    p.add_argument("--series", type=Path, default=None)
    p.add_argument("--features", type=Path, default=None)
    p.add_argument("--contributors", type=Path, default=None)
    p.add_argument("--nodes", type=Path, default=None)
    p.add_argument("--edges", type=Path, default=None)
    p.add_argument(
        "--simulate",
        action="store_true",
        help="generate a synthetic world instead of reading files",
    )
    return parser


def _load_config(args) -> PipelineConfig:
    config = (
        load_pipeline_config(args.config) if args.config is not None else PipelineConfig()
    )
    if args.seed is not None:
        config = replace(config, seed=int(args.seed))
    return config


def _load_inputs(args, config: PipelineConfig):
    bundle = load_bundle(
        args.series,
        features_path=args.features,
        contributors_path=args.contributors,
        nodes_path=args.nodes,
        edges_path=args.edges,
    )
    return bundle.series, bundle.features, bundle.graph


def _cmd_simulate(args) -> int:
    config = _load_config(args)
    spec = SyntheticSpec(
        length=args.length,
        graph_size=args.graph_size,
        coalition_size=args.coalition_size,
        coupling_strength=args.coupling,
        noise_sd=args.noise_sd,
        trend_slope=args.trend,
        seasonal_amplitude=args.seasonal_amplitude,
        base_level=args.base_level,
    )
    scenario = generate_scenario(spec, seed=config.seed)
    paths = write_scenario(scenario, args.out)
    for kind, path in sorted(paths.items()):
        print(f"{kind}: {path}")
    return 0


def _cmd_decompose(args) -> int:
    config = _load_config(args)
    ewt_config = config.ewt
    overrides = {}
    if args.components != "auto":
        overrides["num_components"] = int(args.components)
    if args.gamma != "auto":
        overrides["gamma"] = float(args.gamma)
    if args.prominence is not None:
        overrides["min_peak_prominence"] = float(args.prominence)
    if overrides:
        ewt_config = replace(ewt_config, **overrides)
    series = read_series_csv(args.series)
    spectrum = compute_spectrum(series.values)
    maxima = detect_maxima(spectrum, ewt_config)
    boundaries = compute_boundaries(maxima, ewt_config)
    decomposition = decompose_with_boundaries(series.values, boundaries)

    args.out.mkdir(parents=True, exist_ok=True)
    stem = args.series.stem
    csv_path = args.out / f"{stem}_ewt.csv"
    json_path = args.out / f"{stem}_ewt.json"
    labels = series.labels
    with csv_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        names = [f"component_{k + 1}" for k in range(len(decomposition.components))]
        writer.writerow(["period", "value", *names])
        for i, label in enumerate(labels):
            writer.writerow(
                [
                    label,
                    repr(float(series.values[i])),
                    *[repr(float(c[i])) for c in decomposition.components],
                ]
            )
    sidecar = {
        "num_components": len(decomposition.components),
        "gamma_used": boundaries.gamma_used,
        "omega_maxima": list(boundaries.omega_maxima),
        "delta": list(boundaries.delta),
        "series": str(args.series),
        "length": len(series),
    }
    json_path.write_text(json.dumps(sidecar, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"components: {csv_path}")
    print(f"boundaries: {json_path}")
    return 0


def _cmd_detect_leaders(args) -> int:
    config = _load_config(args)
    from .pipeline.bundle import read_graph_csv

    graph = read_graph_csv(args.nodes, args.edges)
    detector = replace(config.detector, seed=scenario_seeds(config.seed, "detect")["detector"])
    result = detect_leaders(
        graph,
        trust_model=config.trust,
        game_params=config.game,
        synergy_params=config.synergy,
        config=detector,
    )
    weights = assign_weights(
        graph,
        result.coalition,
        decay_kappa=config.decay_kappa,
        max_hops=config.max_hops,
    )
    args.out.mkdir(parents=True, exist_ok=True)
    coalition_path = args.out / "coalition.json"
    weights_path = args.out / "weights.csv"
    coalition_path.write_text(
        json.dumps(
            {
                "members": list(result.coalition.members),
                "synergy": result.coalition.phi,
                "shapley_sum": result.coalition.sp_sum,
                "size": result.coalition.x_size,
                "candidate_pool": list(result.candidate_pool),
                "dropped_candidates": list(result.dropped_candidates),
                "mean_distance": result.mean_distance,
                "distance_mode": result.distance_mode,
            },
            sort_keys=True,
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    with weights_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", "weight", "hops"])
        for node_id in weights.node_ids:
            writer.writerow(
                [node_id, repr(float(weights.weights[node_id])), weights.hops[node_id]]
            )
    print(f"coalition: {', '.join(result.coalition.members)}")
    print(f"coalition file: {coalition_path}")
    print(f"weights file: {weights_path}")
    return 0


def _parse_dim_override(text: str, base: SearchSpace) -> Dimension:
    if "=" not in text:
        raise ValueError(f"--dim expects NAME=LOW:HIGH or NAME=A,B,..., got {text!r}")
    name, _, rest = text.partition("=")
    name = name.strip()
    existing = {d.name: d for d in base.dimensions}
    if name not in existing:
        raise ValueError(f"--dim names an unknown dimension {name!r}")
    old = existing[name]
    if ":" in rest:
        low_text, _, high_text = rest.partition(":")
        kind = old.kind if old.kind != "categorical" else "real_linear"
        return Dimension(name, kind, float(low_text), float(high_text))
    categories = tuple(part.strip() for part in rest.split(",") if part.strip())
    if len(categories) == 1 and old.kind != "categorical":
        value = float(categories[0])
        # a single value pins the dimension by collapsing its range
        return Dimension(name, old.kind, value, value + (1 if old.kind == "integer_linear" else 1e-9))
    return Dimension(name, "categorical", categories=categories)


def _cmd_tune(args) -> int:
    config = _load_config(args)
    series, features, graph = _load_inputs(args, config)
    data = prepare_training_data(
        "tune", series, config, features=features, graph=graph, master_seed=config.seed
    )
    objective = cv_objective(
        data.windows, data.targets, config, data.input_dim, data.seeds["training"]
    )
    space = default_search_space()
    if args.dim:
        dims = {d.name: d for d in space.dimensions}
        for text in args.dim:
            override = _parse_dim_override(text, space)
            dims[override.name] = override
        space = SearchSpace(tuple(dims[d.name] for d in space.dimensions))
    history = run_bo(
        objective,
        space,
        budget=args.budget,
        init_design_size=args.init,
        seed=data.seeds["tuning"],
    )
    args.out.mkdir(parents=True, exist_ok=True)
    history_path = args.out / "bo_history.csv"
    best_path = args.out / "best_config.json"
    names = list(space.names)
    with history_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "loss", "incumbent_loss", *names])
        for entry in history.entries:
            writer.writerow(
                [
                    entry.iteration,
                    repr(float(entry.loss)),
                    repr(float(entry.incumbent_loss)),
                    *[
                        entry.point[n] if isinstance(entry.point[n], str) else repr(entry.point[n])
                        for n in names
                    ],
                ]
            )
    best_path.write_text(
        json.dumps(
            {
                "point": history.best_point,
                "loss": history.best_loss,
                "budget": args.budget,
                "seed": config.seed,
            },
            sort_keys=True,
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    print(f"best loss: {history.best_loss:.6g}")
    print(f"best point: {history.best_point}")
    print(f"history: {history_path}")
    print(f"best config: {best_path}")
    return 0


def _apply_best_config(config: PipelineConfig, path: Path) -> PipelineConfig:
    point = json.loads(path.read_text(encoding="utf-8"))["point"]
    config = replace(
        config,
        units_per_layer=int(point.get("units", config.units_per_layer)),
        num_layers=int(point.get("layers", config.num_layers)),
        dropout_rate=float(point.get("dropout_rate", config.dropout_rate)),
        mode=str(point.get("mode", config.mode)),
    )
    return replace(
        config,
        training=replace(
            config.training,
            learning_rate=float(point.get("learning_rate", config.training.learning_rate)),
            l2_penalty=float(point.get("l2_penalty", config.training.l2_penalty)),
        ),
    )


def _save_fit(fitted: FittedScenario, out_dir: Path) -> dict[str, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"checkpoint": out_dir / "checkpoint.json", "fit": out_dir / "fit.json"}
    save_checkpoint(fitted.model, paths["checkpoint"])
    document = {
        "format": "wavecast-fit",
        "version": 1,
        "label": fitted.label,
        "config_ini": config_to_ini(fitted.config),
        "seeds": dict(fitted.seeds),
        "train_length": fitted.train_length,
        "test_length": fitted.test_length,
        "normalization": {
            "x_min": fitted.normalization.x_min,
            "x_max": fitted.normalization.x_max,
            "x_low": fitted.normalization.x_low,
            "x_high": fitted.normalization.x_high,
        },
        "boundaries": (
            None
            if fitted.boundaries is None
            else {
                "omega_maxima": list(fitted.boundaries.omega_maxima),
                "delta": list(fitted.boundaries.delta),
                "gamma_used": fitted.boundaries.gamma_used,
            }
        ),
        "feature_columns": list(fitted.feature_columns),
        "feature_matrix": (
            None if fitted.feature_matrix is None else fitted.feature_matrix.tolist()
        ),
        "coalition": (
            None
            if fitted.detection is None
            else list(fitted.detection.coalition.members)
        ),
        "tuned_point": None if fitted.tuned_point is None else dict(fitted.tuned_point),
    }
    paths["fit"].write_text(
        json.dumps(document, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return paths


def _load_fit(fit_dir: Path) -> FittedScenario:
    from .pipeline.config import load_pipeline_config as _lpc  # reuse parser
    import tempfile

    document = json.loads((fit_dir / "fit.json").read_text(encoding="utf-8"))
    if document.get("format") != "wavecast-fit":
        raise ValueError(f"{fit_dir}/fit.json is not a fit document")
    model = load_checkpoint(fit_dir / "checkpoint.json")
    with tempfile.NamedTemporaryFile("w", suffix=".ini", delete=False) as handle:
        handle.write(document["config_ini"])
        ini_path = handle.name
    try:
        config = _lpc(ini_path)
    finally:
        Path(ini_path).unlink(missing_ok=True)
    norm = document["normalization"]
    boundaries = None
    if document["boundaries"] is not None:
        b = document["boundaries"]
        boundaries = SpectralBoundaries(
            omega_maxima=tuple(b["omega_maxima"]),
            delta=tuple(b["delta"]),
            gamma_used=float(b["gamma_used"]),
        )
    matrix = document["feature_matrix"]
    return FittedScenario(
        label=document["label"],
        config=config,
        seeds={k: int(v) for k, v in document["seeds"].items()},
        train_length=int(document["train_length"]),
        test_length=int(document["test_length"]),
        normalization=NormalizationParams(
            norm["x_min"], norm["x_max"], norm["x_low"], norm["x_high"]
        ),
        model=model,
        boundaries=boundaries,
        feature_columns=tuple(document["feature_columns"]),
        feature_matrix=None if matrix is None else np.asarray(matrix, dtype=np.float64),
        tuned_point=document.get("tuned_point"),
    )


def _cmd_train(args) -> int:
    config = _load_config(args)
    if args.best_config is not None:
        config = _apply_best_config(config, args.best_config)
    series, features, graph = _load_inputs(args, config)
    fitted = fit_scenario(
        "train", series, config, features=features, graph=graph, master_seed=config.seed
    )
    paths = _save_fit(fitted, args.out)
    result = evaluate_scenario(fitted, series)
    print(f"checkpoint: {paths['checkpoint']}")
    print(f"fit state: {paths['fit']}")
    for horizon in sorted(result.evaluations):
        ev = result.evaluations[horizon]
        print(
            f"held-out horizon {horizon}: MAPE {ev.mape:.4f}%  RMSE {ev.rmse:.4f}  "
            f"RMSRE {ev.rmsre:.6f}"
        )
    return 0


def _cmd_forecast(args) -> int:
    fitted = _load_fit(args.fit_dir)
    series = read_series_csv(args.series)
    horizons = tuple(int(part) for part in str(args.horizons).replace(",", " ").split())
    if not horizons or any(h < 1 for h in horizons):
        raise ValueError("horizons must be positive integers")
    if fitted.feature_matrix is not None and len(series) > fitted.feature_matrix.shape[0]:
        raise ValueError(
            "the stored feature matrix is shorter than the series; "
            "retrain with the longer feature table"
        )
    normalized = apply_normalization(series.values, fitted.normalization)
    origin = len(series) - 1
    rows = []
    last_period = series.periods[-1]
    for horizon in sorted(set(horizons)):
        value = _rolled_forecast(fitted, normalized, origin, horizon)
        raw = float(invert_normalization(np.array([value]), fitted.normalization)[0])
        period = format_period(
            add_periods(last_period, horizon, series.frequency), series.frequency
        )
        rows.append((horizon, period, raw))
    args.out.mkdir(parents=True, exist_ok=True)
    out_path = args.out / "forecasts.csv"
    with out_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["horizon", "period", "forecast"])
        for horizon, period, raw in rows:
            writer.writerow([horizon, period, repr(raw)])
    for horizon, period, raw in rows:
        print(f"h={horizon} {period}: {raw:.4f}")
    print(f"forecasts: {out_path}")
    return 0


def _cmd_evaluate(args) -> int:
    observed = read_series_csv(args.observed)
    predicted = read_series_csv(args.predicted)
    obs_by_period = dict(zip(observed.labels, observed.values))
    shared = [p for p in predicted.labels if p in obs_by_period]
    if not shared:
        raise ValueError("the two series share no periods")
    pred_by_period = dict(zip(predicted.labels, predicted.values))
    y = [obs_by_period[p] for p in shared]
    y_hat = [pred_by_period[p] for p in shared]
    result = evaluate(y, y_hat)
    print(f"periods: {len(shared)} ({shared[0]} .. {shared[-1]})")
    print(f"MAPE:  {result.mape:.4f}%")
    print(f"RMSE:  {result.rmse:.4f}")
    print(f"RMSRE: {result.rmsre:.6f}")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / "metrics.json"
        path.write_text(
            json.dumps(
                {
                    "n": result.n,
                    "mape": result.mape,
                    "rmse": result.rmse,
                    "rmsre": result.rmsre,
                    "first_period": shared[0],
                    "last_period": shared[-1],
                },
                sort_keys=True,
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )
        print(f"metrics: {path}")
    return 0


def _cmd_report(args) -> int:
    report = read_report(args.report)
    paths = emit_report(report, args.out)
    for kind, path in sorted(paths.items()):
        print(f"{kind}: {path}")
    return 0


def _cmd_run(args) -> int:
    config = _load_config(args)
    if args.simulate:
        scenario = generate_scenario(SyntheticSpec(), seed=config.seed)
        series, features, graph = scenario.series, scenario.features, scenario.graph
    else:
        if args.series is None:
            raise ValueError("run needs --series (or --simulate)")
        series, features, graph = _load_inputs(args, config)
    report = run_pipeline(series, config, features=features, graph=graph)
    paths = emit_report(report, args.out)
    print((args.out / "report.txt").read_text(encoding="utf-8"))
    for kind, path in sorted(paths.items()):
        print(f"{kind}: {path}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "decompose": _cmd_decompose,
    "detect-leaders": _cmd_detect_leaders,
    "tune": _cmd_tune,
    "train": _cmd_train,
    "forecast": _cmd_forecast,
    "evaluate": _cmd_evaluate,
    "report": _cmd_report,
    "run": _cmd_run,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not crashes
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
