from typing import Any

import attrs
import numpy as np

from model_swarms.application.exceptions import InvalidValueException
from model_swarms.domain.models.vector import ParamVector, quantize


def _draw_component(instance, attribute, value) -> None:
    if not -1.0 <= value <= 1.0:
        raise InvalidValueException(f"Random draw '{attribute.name}' must be in [-1, 1], got {value}")


@attrs.define(frozen=True)
class RandomDraw:
    r_v: float = attrs.field(converter=float, validator=_draw_component)
    r_p: float = attrs.field(converter=float, validator=_draw_component)
    r_g: float = attrs.field(converter=float, validator=_draw_component)
    r_w: float = attrs.field(converter=float, validator=_draw_component)
    t: float | None = attrs.field(default=None)

    @classmethod
    def ones(cls) -> "RandomDraw":
        return cls(1.0, 1.0, 1.0, 1.0)


@attrs.define
class Particle:
    id: int
    x: ParamVector
    v: ParamVector
    p: ParamVector
    f_x: float | None = None
    f_p: float = float("-inf")
    stagnation_count: int = 0

    def snapshot(self) -> "Particle":
        return Particle(
            id=self.id,
            x=self.x.copy(),
            v=self.v.copy(),
            p=self.p.copy(),
            f_x=self.f_x,
            f_p=self.f_p,
            stagnation_count=self.stagnation_count,
        )

    @property
    def dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "x": quantize(self.x),
            "v": quantize(self.v),
            "p": quantize(self.p),
            "f_x": self.f_x,
            "f_p": self.f_p,
            "stagnation": self.stagnation_count,
        }


@attrs.define
class SwarmState:
    particles: list[Particle]
    g: ParamVector
    f_g: float
    g_w: ParamVector
    f_gw: float
    g_provider: int
    gw_provider: int
    iteration: int = 0
    lambda_: float = 1.0
    g_stagnation: int = 0
    pending_injections: list[int] = attrs.field(factory=list)

    @property
    def dim(self) -> int:
        return int(self.g.shape[0])

    def by_id(self) -> dict[int, Particle]:
        return {particle.id: particle for particle in self.particles}

    def next_id(self) -> int:
        return max(particle.id for particle in self.particles) + 1

    def locations(self) -> list[ParamVector]:
        return [particle.x for particle in sorted(self.particles, key=lambda particle: particle.id)]


@attrs.define(frozen=True)
class EvalSchedule:
    skip_iteration: bool = False
    skipped_particles: frozenset[int] = attrs.field(factory=frozenset, converter=frozenset)

    def skips(self, particle_id: int) -> bool:
        return self.skip_iteration or particle_id in self.skipped_particles


def zero_like(vector: ParamVector) -> ParamVector:
    return np.zeros_like(vector, dtype=np.float64)
