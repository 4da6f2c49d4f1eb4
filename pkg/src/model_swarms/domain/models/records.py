from __future__ import annotations

from typing import Any

import attrs
import numpy as np

from model_swarms.domain.models.vector import ParamVector, quantize

SKIPPED = "skipped"


@attrs.define(frozen=True)
class StepContribution:
    """Scalar weights that rebuild one moved location from the step inputs.

    ``x_t = w_v*v + w_p*p + w_x*x + w_g*g - w_w*g_w`` where every input is the
    value at the start of the step. The 1/C velocity normalization is folded
    into the weights. ``g_provider``/``gw_provider`` name the particles whose
    locations were the global best/worst snapshot of that step.
    """

    w_v: float
    w_p: float
    w_x: float
    w_g: float
    w_w: float
    g_provider: int
    gw_provider: int

    @property
    def total(self) -> float:
        return self.w_v + self.w_p + self.w_x + self.w_g + self.w_w

    def apply(self, v: ParamVector, p: ParamVector, x: ParamVector, g: ParamVector, g_w: ParamVector) -> ParamVector:
        return self.w_v * v + self.w_p * p + self.w_x * x + self.w_g * g - self.w_w * g_w

    @property
    def dict(self) -> dict[str, Any]:
        return attrs.asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StepContribution":
        return cls(**data)


@attrs.define(frozen=True)
class ParticleRecord:
    id: int
    x: list[float]
    v: list[float]
    p: list[float]
    moved: list[float]
    f_x: float | None
    f_p: float
    stagnation: int
    restarted: bool = False
    contribution: StepContribution | None = None

    @property
    def skipped(self) -> bool:
        return self.f_x is None

    def vector(self, name: str) -> ParamVector:
        return np.asarray(getattr(self, name), dtype=np.float64)

    @property
    def dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "x": self.x,
            "v": self.v,
            "p": self.p,
            "moved": self.moved,
            "f_x": SKIPPED if self.f_x is None else self.f_x,
            "f_p": self.f_p,
            "stagnation": self.stagnation,
            "restarted": self.restarted,
            "contribution": None if self.contribution is None else self.contribution.dict,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ParticleRecord":
        contribution = data.get("contribution")
        return cls(
            id=data["id"],
            x=data["x"],
            v=data["v"],
            p=data["p"],
            moved=data["moved"],
            f_x=None if data["f_x"] == SKIPPED else data["f_x"],
            f_p=data["f_p"],
            stagnation=data["stagnation"],
            restarted=data.get("restarted", False),
            contribution=None if contribution is None else StepContribution.from_dict(contribution),
        )

    @classmethod
    def capture(
        cls,
        particle,
        moved: ParamVector,
        f_x: float | None,
        restarted: bool = False,
        contribution: StepContribution | None = None,
    ) -> "ParticleRecord":
        return cls(
            id=particle.id,
            x=quantize(particle.x),
            v=quantize(particle.v),
            p=quantize(particle.p),
            moved=quantize(moved),
            f_x=f_x,
            f_p=particle.f_p,
            stagnation=particle.stagnation_count,
            restarted=restarted,
            contribution=contribution,
        )


@attrs.define(frozen=True)
class RunRecord:
    """Audit entry of one iteration; iteration 0 is the initial evaluation.

    ``g_start``/``gw_start`` are the global best/worst every particle moved
    against, which differ from the previous record after an injection.
    """

    iteration: int
    lambda_: float
    f_g: float
    f_gw: float
    g_provider: int
    gw_provider: int
    g: list[float]
    g_w: list[float]
    g_stagnation: int
    particles: list[ParticleRecord]
    restarts: list[int] = attrs.field(factory=list)
    injected: list[int] = attrs.field(factory=list)
    g_start: list[float] | None = None
    gw_start: list[float] | None = None

    def particle(self, particle_id: int) -> ParticleRecord | None:
        for record in self.particles:
            if record.id == particle_id:
                return record
        return None

    @property
    def dict(self) -> dict[str, Any]:
        return {
            "iteration": self.iteration,
            "lambda": self.lambda_,
            "f_g": self.f_g,
            "f_gw": self.f_gw,
            "g_provider": self.g_provider,
            "gw_provider": self.gw_provider,
            "g": self.g,
            "g_w": self.g_w,
            "g_stagnation": self.g_stagnation,
            "restarts": self.restarts,
            "injected": self.injected,
            "g_start": self.g_start,
            "gw_start": self.gw_start,
            "particles": [particle.dict for particle in self.particles],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunRecord":
        return cls(
            iteration=data["iteration"],
            lambda_=data["lambda"],
            f_g=data["f_g"],
            f_gw=data["f_gw"],
            g_provider=data["g_provider"],
            gw_provider=data["gw_provider"],
            g=data["g"],
            g_w=data["g_w"],
            g_stagnation=data["g_stagnation"],
            particles=[ParticleRecord.from_dict(particle) for particle in data["particles"]],
            restarts=data.get("restarts", []),
            injected=data.get("injected", []),
            g_start=data.get("g_start"),
            gw_start=data.get("gw_start"),
        )
