"""Model parameters, sweep settings and config-file resolution.

A run is fully described by (ModelParams, SweepSpec, seed). Values
resolve in precedence order: command-line flags, then the
HIERARCHY_ABM_SEED environment variable (base_seed only), then the YAML
config file, then the built-in defaults. Unknown config keys are
rejected by name, and the fully resolved mapping is echoed into every
run's meta.json.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field, fields

import yaml

from .env import Arena, Village, default_villages
from .genetics import CapabilityParams

SEED_ENV_VAR = "HIERARCHY_ABM_SEED"

# Village catchments (radius + food reach) tile most of the default
# arena; hungry agents cannot travel, so food respawning outside every
# catchment would slowly drain out of circulation.
DEFAULT_VILLAGE_CENTERS = (
    (12.0, 12.0),
    (36.0, 12.0),
    (24.0, 24.0),
    (12.0, 36.0),
    (36.0, 36.0),
)


@dataclass(frozen=True)
class ModelParams:
    # population / reproduction
    fertility: float = 0.8          # per-pair birth probability scale, in (0,1)
    capacity: int = 200             # logistic ceiling for the birth rate
    n_initial: int = 100
    # heritable ability
    initial_spread: float = 0.05    # founding ability std dev (sweep axis "c")
    mutation_scale: float = 1.0     # mutation std dev (sweep axis "u")
    mutation_prob: float = 1.0
    heritability: float = 0.9
    # energy economy; a birth moves repro_cost from each parent to the
    # child, so reproduction never creates energy
    initial_energy: float = 20.0
    offspring_energy: float = 10.0
    metabolic_cost: float = 0.05
    move_cost: float = 0.1
    food_energy: float = 8.0
    repro_cost: float = 5.0
    # mortality
    hazard_base: float = 0.0005
    hazard_age: float = 0.01
    age_tick_interval: int = 1000
    # environment
    arena_width: float = 48.0
    arena_height: float = 48.0
    village_centers: tuple[tuple[float, float], ...] = DEFAULT_VILLAGE_CENTERS
    village_radius: float = 8.0
    n_food: int = 150
    food_radius: float = 60.0
    neighbor_radius: float = 5.0
    speed: float = 1.0
    regen_rate: float = 0.05

    def __post_init__(self) -> None:
        if not 0.0 < self.fertility < 1.0:
            raise ValueError("fertility must lie in (0, 1)")
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        if self.initial_spread < 0 or self.mutation_scale < 0:
            raise ValueError("initial_spread and mutation_scale must be nonnegative")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must lie in [0, 1]")
        if not 0.0 <= self.heritability <= 1.0:
            raise ValueError("heritability must lie in [0, 1]")
        if len(self.village_centers) != 5:
            raise ValueError("exactly 5 villages are required")
        if not 0.0 <= self.regen_rate <= 1.0:
            raise ValueError("regen_rate must lie in [0, 1]")
        if self.speed <= 0:
            raise ValueError("speed must be positive")

    def arena(self) -> Arena:
        return Arena(self.arena_width, self.arena_height)

    def villages(self) -> list[Village]:
        return default_villages(self.village_centers, self.village_radius)

    def capability(self) -> CapabilityParams:
        return CapabilityParams(
            initial_spread=self.initial_spread,
            mutation_scale=self.mutation_scale,
            mutation_prob=self.mutation_prob,
            heritability=self.heritability,
        )


@dataclass(frozen=True)
class SweepSpec:
    c_values: tuple[float, ...] = (0.05,)
    u_values: tuple[float, ...] = (1.0,)
    replicates: int = 20
    steps: int = 30000
    sample_every: int = 100
    base_seed: int = 0
    stability_window: int = 5       # consecutive stable samples for onset
    rebound_delta: float = 0.05     # how far above the band "rebound" must end
    survivors_only: bool = True     # restrict the ledger to living agents
    workers: int = 1

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")
        if self.steps and self.steps < self.sample_every:
            raise ValueError("steps must be >= sample_every")
        if self.stability_window < 1:
            raise ValueError("stability_window must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    sweep: SweepSpec = field(default_factory=SweepSpec)


_PARAM_KEYS = {f.name for f in fields(ModelParams)}
_SWEEP_KEYS = {f.name for f in fields(SweepSpec)}


class ConfigError(ValueError):
    pass


def load_config_file(path: str) -> dict:
    """Parse a YAML config file into a flat key -> value mapping."""
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must contain a mapping")
    return raw


def _coerce(values: dict) -> tuple[dict, dict]:
    params_kw: dict = {}
    sweep_kw: dict = {}
    for key, value in values.items():
        if key in _PARAM_KEYS:
            if key == "village_centers":
                value = tuple((float(x), float(y)) for x, y in value)
            params_kw[key] = value
        elif key in _SWEEP_KEYS:
            if key in ("c_values", "u_values"):
                value = tuple(float(v) for v in value)
            sweep_kw[key] = value
        else:
            raise ConfigError(f"unknown config key: {key!r}")
    return params_kw, sweep_kw


def resolve_config(file_values: dict | None = None, overrides: dict | None = None,
                   env: dict | None = None) -> RunConfig:
    """Merge defaults, file values and flag overrides into a RunConfig.

    `overrides` entries with value None are treated as absent so callers
    can pass argparse namespaces directly.
    """
    env = os.environ if env is None else env
    merged: dict = {}
    merged.update(file_values or {})
    if SEED_ENV_VAR in env:
        try:
            merged["base_seed"] = int(env[SEED_ENV_VAR])
        except ValueError as err:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer") from err
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    params_kw, sweep_kw = _coerce(merged)
    try:
        return RunConfig(ModelParams(**params_kw), SweepSpec(**sweep_kw))
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from err


def config_as_dict(config: RunConfig) -> dict:
    """Flat, JSON-friendly echo of a resolved configuration.

    The worker count is execution infrastructure, not part of the
    experiment definition, and is omitted so output files stay identical
    across worker counts.
    """
    out = {}
    for section in (config.params, config.sweep):
        for f in fields(section):
            if f.name == "workers":
                continue
            value = getattr(section, f.name)
            if isinstance(value, tuple):
                value = [list(v) if isinstance(v, tuple) else v for v in value]
            out[f.name] = value
    return out


def with_cell(params: ModelParams, c: float, u: float) -> ModelParams:
    """Model parameters for one sweep cell."""
    return dataclasses.replace(params, initial_spread=c, mutation_scale=u)
