"""Pipeline configuration and its plain-text (INI) file format.

Every setting has a default, so a config file only lists what it overrides.
Unknown sections or keys are hard errors: a typo must never silently fall back
to a default. The section/key layout mirrors the run stages:

    [pipeline]       feature_mode, use_ewt, use_leaders, horizons, seed, test_length
    [normalization]  x_low, x_high
    [ewt]            num_components, gamma, min_peak_prominence, max_auto_components
    [trust]          k, l, s, w_d, w_i, w_r
    [game]           x_pay, y_pay, i_pay, d, u_a, u_b, lambda, rho, mu, eta
    [synergy]        delta, partial, c
    [detector]       ec_percentile, neighbor_threshold, max_coalition_size,
                     exact_enumeration_limit, beam_width, require_agreement_viable,
                     distance_mode, exact_shapley_limit, mc_samples
    [weights]        decay_kappa, max_hops
    [network]        window_length, units_per_layer, num_layers, dropout_rate, mode
    [training]       learning_rate, l2_penalty, max_epochs, patience, grad_clip_norm,
                     restarts
    [tuning]         budget, init_design_size
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np

from ..ewt import EwtConfig
from ..leaders import GameParams, SearchConfig, SynergyParams, TrustModel
from ..nn import NetworkSpec, TrainingConfig
from .features import FEATURE_MODES

__all__ = ["PipelineConfig", "load_pipeline_config", "build_config", "config_to_ini"]


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a pipeline run needs beyond the data itself."""

    feature_mode: str = "full"
    use_ewt: bool = True
    use_leaders: bool = True
    ewt: EwtConfig = field(default_factory=EwtConfig)
    trust: TrustModel = field(default_factory=TrustModel)
    game: GameParams = field(default_factory=GameParams)
    synergy: SynergyParams = field(default_factory=SynergyParams)
    detector: SearchConfig = field(default_factory=SearchConfig)
    decay_kappa: float = float(np.log(2.0))
    max_hops: int = 3
    window_length: int = 12
    units_per_layer: int = 32
    num_layers: int = 1
    dropout_rate: float = 0.1
    mode: str = "bilstm"
    training: TrainingConfig = field(default_factory=TrainingConfig)
    bo_budget: int | None = None
    bo_init: int | None = None
    test_length: int | None = None
    horizons: tuple[int, ...] = (1, 2, 3)
    x_low: float = 0.0
    x_high: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.feature_mode not in FEATURE_MODES:
            raise ValueError(f"feature_mode must be one of {FEATURE_MODES}")
        horizons = tuple(int(h) for h in self.horizons)
        if not horizons or any(h < 1 for h in horizons):
            raise ValueError("horizons must be positive integers")
        if any(b <= a for a, b in zip(horizons, horizons[1:])):
            raise ValueError("horizons must be strictly increasing")
        if self.bo_budget is not None and int(self.bo_budget) < 2:
            raise ValueError("bo_budget must be at least 2 when set")
        if self.test_length is not None and int(self.test_length) < 2:
            raise ValueError("test_length must be at least 2 when set")
        if not self.x_low < self.x_high:
            raise ValueError("x_low must be strictly below x_high")
        object.__setattr__(self, "horizons", horizons)
        # constructing a spec validates the network fields eagerly
        self.network_spec(1)

    def network_spec(self, input_dim: int) -> NetworkSpec:
        """NetworkSpec for data with the given channel count."""
        return NetworkSpec(
            input_dim=int(input_dim),
            window_length=self.window_length,
            units_per_layer=self.units_per_layer,
            num_layers=self.num_layers,
            dropout_rate=self.dropout_rate,
            mode=self.mode,
        )


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_horizons(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.replace(",", " ").split())


def _or_auto(convert: Callable[[str], Any]) -> Callable[[str], Any]:
    def parse(text: str):
        return "auto" if text.strip().lower() == "auto" else convert(text)

    return parse


def _or_none(convert: Callable[[str], Any]) -> Callable[[str], Any]:
    def parse(text: str):
        return None if text.strip().lower() in ("none", "") else convert(text)

    return parse


_SCHEMA: dict[str, dict[str, Callable[[str], Any]]] = {
    "pipeline": {
        "feature_mode": str,
        "use_ewt": _parse_bool,
        "use_leaders": _parse_bool,
        "horizons": _parse_horizons,
        "seed": int,
        "test_length": _or_none(int),
    },
    "normalization": {"x_low": float, "x_high": float},
    "ewt": {
        "num_components": _or_auto(int),
        "gamma": _or_auto(float),
        "min_peak_prominence": float,
        "max_auto_components": int,
    },
    "trust": {"k": float, "l": float, "s": float, "w_d": float, "w_i": float, "w_r": float},
    "game": {
        "x_pay": float,
        "y_pay": float,
        "i_pay": float,
        "d": _or_none(float),
        "u_a": float,
        "u_b": float,
        "lambda": float,
        "rho": float,
        "mu": float,
        "eta": float,
    },
    "synergy": {"delta": float, "partial": float, "c": float},
    "detector": {
        "ec_percentile": float,
        "neighbor_threshold": int,
        "max_coalition_size": int,
        "exact_enumeration_limit": int,
        "beam_width": int,
        "require_agreement_viable": _parse_bool,
        "distance_mode": str,
        "exact_shapley_limit": int,
        "mc_samples": int,
    },
    "weights": {"decay_kappa": float, "max_hops": int},
    "network": {
        "window_length": int,
        "units_per_layer": int,
        "num_layers": int,
        "dropout_rate": float,
        "mode": str,
    },
    "training": {
        "learning_rate": float,
        "l2_penalty": float,
        "max_epochs": int,
        "patience": int,
        "grad_clip_norm": float,
        "restarts": int,
    },
    "tuning": {"budget": _or_none(int), "init_design_size": _or_none(int)},
}

# "lambda" is a keyword, so the GameParams field is called lam
_FIELD_RENAMES = {("game", "lambda"): "lam"}


def build_config(sections: Mapping[str, Mapping[str, Any]]) -> PipelineConfig:
    """Construct a PipelineConfig from already-typed section overrides."""
    for section in sections:
        if section not in _SCHEMA:
            raise ValueError(f"unknown config section [{section}]")
        for key in sections[section]:
            if key not in _SCHEMA[section]:
                raise ValueError(f"unknown key {key!r} in section [{section}]")

    def collect(section: str) -> dict[str, Any]:
        out = dict(sections.get(section, {}))
        return {
            _FIELD_RENAMES.get((section, key), key): value for key, value in out.items()
        }

    config = PipelineConfig(
        ewt=EwtConfig(**collect("ewt")),
        trust=TrustModel(**collect("trust")),
        game=GameParams(**collect("game")),
        synergy=SynergyParams(**collect("synergy")),
        detector=SearchConfig(**collect("detector")),
        training=TrainingConfig(**collect("training")),
        **collect("pipeline"),
        **collect("normalization"),
        **collect("weights"),
        **collect("network"),
    )
    tuning = collect("tuning")
    if tuning:
        config = replace(
            config,
            bo_budget=tuning.get("budget", None),
            bo_init=tuning.get("init_design_size", None),
        )
    return config


def load_pipeline_config(path: str | Path) -> PipelineConfig:
    """Read an INI config file; unknown sections or keys are errors."""
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    text = Path(path).read_text(encoding="utf-8")
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ValueError(f"cannot parse {path}: {exc}") from exc
    sections: dict[str, dict[str, Any]] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ValueError(f"{path}: unknown config section [{section}]")
        converted: dict[str, Any] = {}
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ValueError(f"{path}: unknown key {key!r} in section [{section}]")
            try:
                converted[key] = _SCHEMA[section][key](raw)
            except ValueError as exc:
                raise ValueError(f"{path}: bad value for {section}.{key}: {exc}") from exc
        sections[section] = converted
    return build_config(sections)


def config_to_ini(config: PipelineConfig) -> str:
    """Render a config as a complete INI document (inverse of loading)."""
    default_game_d = "none" if config.game.d is None else repr(config.game.d)
    lines = [
        "[pipeline]",
        f"feature_mode = {config.feature_mode}",
        f"use_ewt = {str(config.use_ewt).lower()}",
        f"use_leaders = {str(config.use_leaders).lower()}",
        f"horizons = {', '.join(str(h) for h in config.horizons)}",
        f"seed = {config.seed}",
        f"test_length = {'none' if config.test_length is None else config.test_length}",
        "",
        "[normalization]",
        f"x_low = {config.x_low!r}",
        f"x_high = {config.x_high!r}",
        "",
        "[ewt]",
        f"num_components = {config.ewt.num_components}",
        f"gamma = {config.ewt.gamma}",
        f"min_peak_prominence = {config.ewt.min_peak_prominence!r}",
        f"max_auto_components = {config.ewt.max_auto_components}",
        "",
        "[trust]",
        f"k = {config.trust.k!r}",
        f"l = {config.trust.l!r}",
        f"s = {config.trust.s!r}",
        f"w_d = {config.trust.w_d!r}",
        f"w_i = {config.trust.w_i!r}",
        f"w_r = {config.trust.w_r!r}",
        "",
        "[game]",
        f"x_pay = {config.game.x_pay!r}",
        f"y_pay = {config.game.y_pay!r}",
        f"i_pay = {config.game.i_pay!r}",
        f"d = {default_game_d}",
        f"u_a = {config.game.u_a!r}",
        f"u_b = {config.game.u_b!r}",
        f"lambda = {config.game.lam!r}",
        f"rho = {config.game.rho!r}",
        f"mu = {config.game.mu!r}",
        f"eta = {config.game.eta!r}",
        "",
        "[synergy]",
        f"delta = {config.synergy.delta!r}",
        f"partial = {config.synergy.partial!r}",
        f"c = {config.synergy.c!r}",
        "",
        "[detector]",
        f"ec_percentile = {config.detector.ec_percentile!r}",
        f"neighbor_threshold = {config.detector.neighbor_threshold}",
        f"max_coalition_size = {config.detector.max_coalition_size}",
        f"exact_enumeration_limit = {config.detector.exact_enumeration_limit}",
        f"beam_width = {config.detector.beam_width}",
        f"require_agreement_viable = {str(config.detector.require_agreement_viable).lower()}",
        f"distance_mode = {config.detector.distance_mode}",
        f"exact_shapley_limit = {config.detector.exact_shapley_limit}",
        f"mc_samples = {config.detector.mc_samples}",
        "",
        "[weights]",
        f"decay_kappa = {config.decay_kappa!r}",
        f"max_hops = {config.max_hops}",
        "",
        "[network]",
        f"window_length = {config.window_length}",
        f"units_per_layer = {config.units_per_layer}",
        f"num_layers = {config.num_layers}",
        f"dropout_rate = {config.dropout_rate!r}",
        f"mode = {config.mode}",
        "",
        "[training]",
        f"learning_rate = {config.training.learning_rate!r}",
        f"l2_penalty = {config.training.l2_penalty!r}",
        f"max_epochs = {config.training.max_epochs}",
        f"patience = {config.training.patience}",
        f"grad_clip_norm = {config.training.grad_clip_norm!r}",
        f"restarts = {config.training.restarts}",
        "",
        "[tuning]",
        f"budget = {'none' if config.bo_budget is None else config.bo_budget}",
        f"init_design_size = {'none' if config.bo_init is None else config.bo_init}",
    ]
    return "\n".join(lines) + "\n"
