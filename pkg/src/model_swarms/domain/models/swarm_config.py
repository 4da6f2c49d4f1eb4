from typing import Any

import attrs

from model_swarms.application.exceptions import ConfigurationNotValid


def _unit_interval(instance, attribute, value) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigurationNotValid(f"'{attribute.name}' must be in [0, 1], got {value}")


def _at_least_one(instance, attribute, value) -> None:
    if value < 1:
        raise ConfigurationNotValid(f"'{attribute.name}' must be >= 1, got {value}")


def _positive(instance, attribute, value) -> None:
    if not value > 0:
        raise ConfigurationNotValid(f"'{attribute.name}' must be > 0, got {value}")


def _decay(instance, attribute, value) -> None:
    if not 0.0 < value <= 1.0:
        raise ConfigurationNotValid(f"'{attribute.name}' must be in (0, 1], got {value}")


def _walk_low(instance, attribute, value) -> None:
    if not -1.0 <= value <= 0.0:
        raise ConfigurationNotValid(f"'{attribute.name}' must be in [-1, 0], got {value}")


@attrs.define(frozen=True)
class SwarmConfig:
    """Every knob of a swarm search.

    ``N`` is the population size after crossover; ``c`` and ``c_r`` are the
    search and restart patience in iterations. The three ablation switches each
    remove one source of randomness: crossover, starting velocity and the
    walk factors of the velocity update. A negative ``walk_low`` widens the walk
    factors to U(walk_low, 1) so a particle can occasionally step backwards.
    """

    n_initial: int = attrs.field(default=10, converter=int, validator=_at_least_one)
    N: int = attrs.field(default=20, converter=int, validator=_at_least_one)
    lambda0: float = attrs.field(default=0.5, converter=float, validator=_positive)
    phi_lambda: float = attrs.field(default=0.95, converter=float, validator=_decay)
    phi_v: float = attrs.field(default=0.3, converter=float, validator=_unit_interval)
    phi_p: float = attrs.field(default=0.3, converter=float, validator=_unit_interval)
    phi_g: float = attrs.field(default=0.4, converter=float, validator=_unit_interval)
    phi_w: float = attrs.field(default=0.05, converter=float, validator=_unit_interval)
    c: int = attrs.field(default=10, converter=int, validator=_at_least_one)
    c_r: int = attrs.field(default=5, converter=int, validator=_at_least_one)
    K: int = attrs.field(default=50, converter=int, validator=_at_least_one)
    d_k: float = attrs.field(default=0.0, converter=float, validator=_unit_interval)
    d_n: float = attrs.field(default=0.0, converter=float, validator=_unit_interval)
    seed: int | None = attrs.field(default=None, converter=attrs.converters.optional(int))
    disable_crossover: bool = attrs.field(default=False, converter=bool)
    zero_init_velocity: bool = attrs.field(default=False, converter=bool)
    deterministic_randoms: bool = attrs.field(default=False, converter=bool)
    tolerate_eval_failure: bool = attrs.field(default=False, converter=bool)
    workers: int = attrs.field(default=1, converter=int, validator=_at_least_one)
    walk_low: float = attrs.field(default=0.0, converter=float, validator=_walk_low)

    def __attrs_post_init__(self) -> None:
        if self.N < self.n_initial:
            raise ConfigurationNotValid(f"'N' ({self.N}) must be >= 'n_initial' ({self.n_initial})")
        if self.d_k > 0 and self.d_n > 0:
            raise ConfigurationNotValid("Only one of 'd_k' and 'd_n' may be nonzero in a run")
        if self.seed is not None and self.seed < 0:
            raise ConfigurationNotValid(f"'seed' must be a nonnegative integer, got {self.seed!r}")

    @property
    def dict(self) -> dict[str, Any]:
        return attrs.asdict(self)

    def evolve(self, **changes: Any) -> "SwarmConfig":
        try:
            return attrs.evolve(self, **changes)
        except TypeError as e:
            raise ConfigurationNotValid(str(e)) from e
