"""Flat ``key=value`` run configuration files.

Keys not listed in ``RUN_KEYS`` or ``SwarmConfig`` are rejected; missing keys
take the defaults below.
"""
import logging
from pathlib import Path
from typing import Any, Mapping

import attrs
import numpy as np
from dotenv import dotenv_values

from model_swarms.application.adapters.checkpoint import CheckpointRepository
from model_swarms.application.adapters.utilities import (
    LANDSCAPES,
    ExternalUtility,
    LandscapeUtility,
    LinearProbeUtility,
)
from model_swarms.application.exceptions import ConfigurationNotValid
from model_swarms.application.use_cases.search import DEFAULT_GRID, GRID_AXES
from model_swarms.domain.models.swarm_config import SwarmConfig
from model_swarms.domain.models.tasks import ExternalUtilitySpec, synthetic_classification
from model_swarms.domain.models.vector import ParamVector
from model_swarms.domain.ports.utility import UtilityFnABC

logger = logging.getLogger(f"model-swarms.{__name__}")

SWARM_KEYS = tuple(field.name for field in attrs.fields(SwarmConfig))
BOOLEAN_KEYS = ("disable_crossover", "zero_init_velocity", "deterministic_randoms", "tolerate_eval_failure")
UTILITIES = (*LANDSCAPES, "linear_probe", "external")

RUN_DEFAULTS: dict[str, Any] = {
    "utility": "sphere",
    "dim": 10,
    "experts": (),
    "random_experts": 10,
    "expert_low": -5.0,
    "expert_high": 5.0,
    "probe_samples": 50,
    "probe_features": 2,
    "probe_classes": 2,
    "probe_separation": 4.0,
    "probe_seed": 0,
    "external_command": None,
    "external_workdir": None,
    "external_timeout": 600.0,
    "token_contexts": (),
    "token_targets": None,
    "diversity": None,
    "log_path": None,
    "best_path": None,
}
GRID_KEYS = {f"grid_{axis}": axis for axis in GRID_AXES if axis != "lambda0"} | {"grid_lambda": "lambda0"}
RUN_KEYS = (*RUN_DEFAULTS, *GRID_KEYS)


def _boolean(key: str, value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigurationNotValid(f"'{key}' must be a boolean, got {value!r}")


def _listing(value: str) -> tuple[str, ...]:
    return tuple(item.strip() for item in value.split(",") if item.strip())


def _number(key: str, value: str, kind: type) -> Any:
    try:
        return kind(value)
    except ValueError as e:
        raise ConfigurationNotValid(f"'{key}' must be a {kind.__name__}, got {value!r}") from e


@attrs.define(frozen=True)
class RunSettings:
    swarm: SwarmConfig
    utility: str
    dim: int
    experts: tuple[str, ...]
    random_experts: int
    expert_low: float
    expert_high: float
    probe_samples: int
    probe_features: int
    probe_classes: int
    probe_separation: float
    probe_seed: int
    external_command: str | None
    external_workdir: str | None
    external_timeout: float
    token_contexts: tuple[str, ...]
    token_targets: str | None
    diversity: tuple[int, int] | None
    grid: dict[str, tuple[float, ...]]
    log_path: str | None
    best_path: str | None
    raw: dict[str, str]

    @property
    def population_base(self) -> int:
        if self.diversity is not None:
            return self.diversity[0] * self.diversity[1]
        if self.experts:
            return len(self.experts)
        return self.random_experts


def parse_run_settings(values: Mapping[str, str | None]) -> RunSettings:
    raw = {key: "" if value is None else str(value) for key, value in values.items()}
    unknown = sorted(set(raw) - set(SWARM_KEYS) - set(RUN_KEYS))
    if unknown:
        raise ConfigurationNotValid(f"Unknown configuration keys: {', '.join(unknown)}")

    run = dict(RUN_DEFAULTS)
    grid = dict(DEFAULT_GRID)

    for key, value in raw.items():
        if key in SWARM_KEYS:
            continue
        if key in GRID_KEYS:
            axis = GRID_KEYS[key]
            grid[axis] = tuple(_number(key, item, float) for item in _listing(value))
            if not grid[axis]:
                raise ConfigurationNotValid(f"Grid axis '{axis}' is empty")
        elif key in ("experts", "token_contexts"):
            run[key] = _listing(value)
        elif key == "diversity":
            run[key] = _diversity(value)
        elif isinstance(RUN_DEFAULTS[key], (int, float)):
            run[key] = _number(key, value, type(RUN_DEFAULTS[key]))
        else:
            run[key] = value or None

    if run["utility"] not in UTILITIES:
        raise ConfigurationNotValid(f"Unknown utility '{run['utility']}', expected one of {', '.join(UTILITIES)}")
    if run["utility"] == "external" and not run["external_command"]:
        raise ConfigurationNotValid("utility=external needs 'external_command'")

    swarm_values: dict[str, Any] = {}
    for key in SWARM_KEYS:
        if key not in raw:
            continue
        if key in BOOLEAN_KEYS:
            swarm_values[key] = _boolean(key, raw[key])
        elif key == "seed":
            swarm_values[key] = _number(key, raw[key], int) if raw[key] else None
        else:
            swarm_values[key] = raw[key]

    settings = RunSettings(swarm=SwarmConfig(), grid=grid, raw=raw, **run)
    swarm_values.setdefault("n_initial", settings.population_base)

    try:
        swarm = SwarmConfig(**swarm_values)
    except ValueError as e:
        raise ConfigurationNotValid(str(e)) from e

    return attrs.evolve(settings, swarm=swarm)


def _diversity(value: str) -> tuple[int, int]:
    parts = value.lower().replace("×", "x").split("x")
    if len(parts) != 2 or not all(part.strip().isdigit() for part in parts):
        raise ConfigurationNotValid(f"'diversity' must look like AxB, got {value!r}")
    return int(parts[0]), int(parts[1])


def load_run_config(path: str | Path) -> RunSettings:
    if not Path(path).is_file():
        raise ConfigurationNotValid(f"Run configuration '{path}' does not exist")

    settings = parse_run_settings(dotenv_values(path))
    logger.info("Run configuration loaded", extra={"props": {"path": str(path), "utility": settings.utility}})
    return settings


def build_utility(settings: RunSettings) -> UtilityFnABC:
    if settings.utility in LANDSCAPES:
        return LandscapeUtility(settings.utility)

    if settings.utility == "linear_probe":
        dataset = synthetic_classification(
            n_per_class=settings.probe_samples,
            n_features=settings.probe_features,
            n_classes=settings.probe_classes,
            separation=settings.probe_separation,
            seed=settings.probe_seed,
        )
        return LinearProbeUtility(dataset)

    spec = ExternalUtilitySpec(
        command=settings.external_command,
        workdir=settings.external_workdir,
        timeout=settings.external_timeout,
    )
    return ExternalUtility(spec)


def particle_dim(settings: RunSettings) -> int:
    if settings.utility == "linear_probe":
        return settings.probe_features * settings.probe_classes + settings.probe_classes
    return settings.dim


def build_experts(settings: RunSettings, seed: int) -> list[ParamVector]:
    """Expert checkpoints named in the config, or seeded uniform random experts."""
    if settings.experts:
        return [CheckpointRepository.load(path) for path in settings.experts]

    rng = np.random.default_rng((seed, 1))
    shape = (settings.random_experts, particle_dim(settings))
    return list(rng.uniform(settings.expert_low, settings.expert_high, size=shape))
