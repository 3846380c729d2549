"""Experiment configuration: a single JSON document.

Layout::

    {
      "aircraft": {"sprung_mass": 64500.0, ...},        # any subset; rest default
      "scenario": "three_point" | {"name": ..., "dt": ..., ...},
      "configurations": ["passive", "zn", {"label": ..., "controller": ..., "suspension": ...}],
      "optimizer": {"objective_type": 1, "bees": {...}, "search_space": null, ...},
      "analysis": {"gear": "nose"},
      "output_dir": "out",
      "seed": 0
    }

Preset names (``passive``, ``zn``, ``ba1``, ``ba2``) expand on load, and
:func:`emit_config` always writes the expanded form, so
``parse_config(emit_config(c)) == c``.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from .controller import DIRECT, FORCE_MODES, ControlConfig, HydraulicParams, PidGains
from .dynamics import AircraftParams
from .optimizer import BeesConfig, SearchSpace
from .scenarios import (BUILTIN_SCENARIOS, GEAR_INDEX, PRESETS, Configuration, Scenario,
                        Suspension, reference_configurations, three_point)


class ConfigError(ValueError):
    """Invalid experiment configuration; the message starts with the field path."""


@dataclass(frozen=True)
class OptimizerSettings:
    objective_type: int = 1
    bees: BeesConfig = field(default_factory=BeesConfig)
    search_space: Optional[SearchSpace] = None  # None: default bounds
    force_mode: str = DIRECT
    weights_type1: Optional[Tuple[float, ...]] = None
    weights_type2: Optional[Tuple[float, ...]] = None
    inject_baseline: bool = True
    workers: int = 1

    def weights(self, objective_type: int):
        return self.weights_type1 if objective_type == 1 else self.weights_type2


@dataclass(frozen=True)
class ExperimentConfig:
    aircraft: AircraftParams = field(default_factory=AircraftParams.a320)
    scenario: Scenario = field(default_factory=three_point)
    configurations: Tuple[Configuration, ...] = field(
        default_factory=lambda: tuple(reference_configurations()))
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    gear: str = "nose"
    output_dir: str = "out"
    seed: int = 0

    def bees(self) -> BeesConfig:
        return dataclasses.replace(self.optimizer.bees, rng_seed=self.seed)


def _section(path: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        raise ConfigError(f"{path}: {msg}") from None


def _expect_dict(path: str, value) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected an object, got {type(value).__name__}")
    return value


def _check_keys(path: str, data: Dict[str, Any], allowed):
    extra = set(data) - set(allowed)
    if extra:
        raise ConfigError(f"{path}: unknown key(s) {sorted(extra)}")


# -- parsing -----------------------------------------------------------------

def _parse_scenario(data) -> Scenario:
    if isinstance(data, str):
        return _section("scenario", BUILTIN_SCENARIOS.__getitem__, data)()
    data = dict(_expect_dict("scenario", data))
    names = [f.name for f in dataclasses.fields(Scenario)]
    _check_keys("scenario", data, names)
    for key in names[1:]:
        if key in data:
            _section(f"scenario.{key}", _validate_field, key, data[key])
    name = data.pop("name", "three_point")
    if name in BUILTIN_SCENARIOS:
        return _section("scenario", BUILTIN_SCENARIOS[name], **data)
    return _section("scenario", Scenario, name, **data)


def _validate_field(key, value):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ValueError(f"{key} must be a number, got {value!r}") from None
    if key in ("dt", "duration") and not v > 0:
        raise ValueError(f"{key} must be > 0, got {value!r}")


def _parse_gains(path, data) -> PidGains:
    data = _expect_dict(path, data)
    _check_keys(path, data, ("kp", "ki", "kd"))
    return _section(path, lambda: PidGains(**{k: float(v) for k, v in data.items()}))


def _parse_hydraulic(path, data) -> Optional[HydraulicParams]:
    if data is None:
        return None
    data = _expect_dict(path, data)
    _check_keys(path, data, [f.name for f in dataclasses.fields(HydraulicParams)])
    return _section(path, lambda: HydraulicParams(**{k: float(v) for k, v in data.items()}))


def _parse_controller(path, data) -> Optional[ControlConfig]:
    if data is None:
        return None
    data = _expect_dict(path, data)
    _check_keys(path, data, ("nose", "main", "force_mode", "reference",
                             "nose_hydraulic", "main_hydraulic"))
    if "nose" not in data or "main" not in data:
        raise ConfigError(f"{path}: needs 'nose' and 'main' gains")
    return _section(path, ControlConfig,
                    nose_gains=_parse_gains(f"{path}.nose", data["nose"]),
                    main_gains=_parse_gains(f"{path}.main", data["main"]),
                    force_mode=data.get("force_mode", DIRECT),
                    nose_hydraulic=_parse_hydraulic(f"{path}.nose_hydraulic", data.get("nose_hydraulic")),
                    main_hydraulic=_parse_hydraulic(f"{path}.main_hydraulic", data.get("main_hydraulic")),
                    reference=_section(f"{path}.reference", float, data.get("reference", 0.0)))


def _parse_configuration(path, data) -> Configuration:
    if isinstance(data, str):
        if data not in PRESETS:
            raise ConfigError(f"{path}: unknown preset {data!r}; presets are {sorted(PRESETS)}")
        return PRESETS[data]()
    data = _expect_dict(path, data)
    _check_keys(path, data, ("label", "controller", "suspension"))
    if not isinstance(data.get("label"), str) or not data["label"]:
        raise ConfigError(f"{path}.label: a non-empty string label is required")
    susp = data.get("suspension") or {}
    _check_keys(f"{path}.suspension", _expect_dict(f"{path}.suspension", susp),
                [f.name for f in dataclasses.fields(Suspension)])
    suspension = _section(f"{path}.suspension", lambda: Suspension(
        **{k: (None if v is None else float(v)) for k, v in susp.items()}))
    for k, v in dataclasses.asdict(suspension).items():
        if v is not None and not v > 0 and not (k.endswith("_cs") and v == 0):
            raise ConfigError(f"{path}.suspension.{k}: must be positive, got {v!r}")
    return Configuration(data["label"], _parse_controller(f"{path}.controller", data.get("controller")),
                         suspension)


def _parse_space(data) -> Optional[SearchSpace]:
    if data is None:
        return None
    path = "optimizer.search_space"
    data = _expect_dict(path, data)
    _check_keys(path, data, ("names", "lower", "upper"))
    return _section(path, SearchSpace, tuple(data["names"]), tuple(data["lower"]), tuple(data["upper"]))


def _parse_optimizer(data) -> OptimizerSettings:
    data = _expect_dict("optimizer", data or {})
    _check_keys("optimizer", data, [f.name for f in dataclasses.fields(OptimizerSettings)])
    bees_data = _expect_dict("optimizer.bees", data.get("bees", {}))
    bees_fields = [f.name for f in dataclasses.fields(BeesConfig) if f.name != "rng_seed"]
    _check_keys("optimizer.bees", bees_data, bees_fields)
    bees = _section("optimizer.bees", BeesConfig, **bees_data)
    objective_type = data.get("objective_type", 1)
    if objective_type not in (1, 2):
        raise ConfigError(f"optimizer.objective_type: must be 1 or 2, got {objective_type!r}")

    def weights(key, n):
        w = data.get(key)
        if w is None:
            return None
        if not isinstance(w, list) or len(w) != n:
            raise ConfigError(f"optimizer.{key}: expected a list of {n} numbers")
        return tuple(float(v) for v in w)

    workers = data.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError(f"optimizer.workers: must be a positive integer, got {workers!r}")
    force_mode = data.get("force_mode", DIRECT)
    if force_mode not in FORCE_MODES:
        raise ConfigError(f"optimizer.force_mode: must be one of {FORCE_MODES}, got {force_mode!r}")
    return OptimizerSettings(
        objective_type=objective_type, bees=bees, search_space=_parse_space(data.get("search_space")),
        force_mode=force_mode, weights_type1=weights("weights_type1", 18),
        weights_type2=weights("weights_type2", 6),
        inject_baseline=bool(data.get("inject_baseline", True)), workers=workers)


TOP_LEVEL = ("aircraft", "scenario", "configurations", "optimizer", "analysis", "output_dir", "seed")


def parse_config(data: Dict[str, Any]) -> ExperimentConfig:
    data = _expect_dict("config", data)
    _check_keys("config", data, TOP_LEVEL)
    aircraft = _section("aircraft", AircraftParams.from_dict, _expect_dict("aircraft", data.get("aircraft", {})))
    scenario = _parse_scenario(data.get("scenario", "three_point"))
    raw_configs = data.get("configurations", ["passive", "zn", "ba1", "ba2"])
    if not isinstance(raw_configs, list):
        raise ConfigError("configurations: expected a list")
    configs = tuple(_parse_configuration(f"configurations[{i}]", c) for i, c in enumerate(raw_configs))
    labels = [c.label for c in configs]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"configurations: duplicate labels in {labels}")
    analysis = _expect_dict("analysis", data.get("analysis", {}))
    _check_keys("analysis", analysis, ("gear",))
    gear = analysis.get("gear", "nose")
    if gear not in GEAR_INDEX and gear != "max":
        raise ConfigError(f"analysis.gear: must be one of {sorted(GEAR_INDEX) + ['max']}, got {gear!r}")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"seed: must be a non-negative integer, got {seed!r}")
    output_dir = data.get("output_dir", "out")
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("output_dir: must be a non-empty string")
    return ExperimentConfig(aircraft=aircraft, scenario=scenario, configurations=configs,
                            optimizer=_parse_optimizer(data.get("optimizer")), gear=gear,
                            output_dir=output_dir, seed=seed)


# -- emission ----------------------------------------------------------------

def _controller_dict(c: Optional[ControlConfig]):
    if c is None:
        return None
    return {
        "nose": dataclasses.asdict(c.nose_gains),
        "main": dataclasses.asdict(c.main_gains),
        "force_mode": c.force_mode,
        "reference": c.reference,
        "nose_hydraulic": None if c.nose_hydraulic is None else dataclasses.asdict(c.nose_hydraulic),
        "main_hydraulic": None if c.main_hydraulic is None else dataclasses.asdict(c.main_hydraulic),
    }


def configuration_dict(c: Configuration) -> Dict[str, Any]:
    return {"label": c.label, "controller": _controller_dict(c.controller),
            "suspension": dataclasses.asdict(c.suspension)}


def emit_config(cfg: ExperimentConfig) -> Dict[str, Any]:
    opt = cfg.optimizer
    bees = dataclasses.asdict(opt.bees)
    bees.pop("rng_seed")
    space = None
    if opt.search_space is not None:
        space = {"names": list(opt.search_space.names), "lower": list(opt.search_space.lower),
                 "upper": list(opt.search_space.upper)}
    return {
        "aircraft": cfg.aircraft.to_dict(),
        "scenario": dataclasses.asdict(cfg.scenario),
        "configurations": [configuration_dict(c) for c in cfg.configurations],
        "optimizer": {
            "objective_type": opt.objective_type,
            "bees": bees,
            "search_space": space,
            "force_mode": opt.force_mode,
            "weights_type1": None if opt.weights_type1 is None else list(opt.weights_type1),
            "weights_type2": None if opt.weights_type2 is None else list(opt.weights_type2),
            "inject_baseline": opt.inject_baseline,
            "workers": opt.workers,
        },
        "analysis": {"gear": cfg.gear},
        "output_dir": cfg.output_dir,
        "seed": cfg.seed,
    }


def dumps_config(cfg: ExperimentConfig) -> str:
    return json.dumps(emit_config(cfg), indent=2) + "\n"


def loads_config(text: str) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from None
    return parse_config(data)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror or exc}") from None
    return loads_config(text)
