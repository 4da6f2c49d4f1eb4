import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Mapping, Sequence

import attrs
import numpy as np

from model_swarms.application.exceptions import (
    ConfigurationNotValid,
    EvaluationFailedException,
    InvalidValueException,
)
from model_swarms.domain.models.records import ParticleRecord, RunRecord
from model_swarms.domain.models.swarm import EvalSchedule, Particle, SwarmState
from model_swarms.domain.models.swarm_config import SwarmConfig
from model_swarms.domain.models.vector import ParamVector, check_same_dim, quantize, to_param_vector
from model_swarms.domain.ports.sink import RecordSinkABC
from model_swarms.domain.ports.utility import UtilityFnABC
from model_swarms.domain.swarm_core import (
    draw_randoms,
    init_velocity,
    populate,
    step_contribution,
    update_location,
    update_velocity,
)

logger = logging.getLogger(f"model-swarms.{__name__}")

GRID_AXES = ("phi_v", "phi_p", "phi_g", "phi_w", "lambda0")

DEFAULT_GRID: dict[str, tuple[float, ...]] = {
    "phi_v": (0.1, 0.2, 0.3),
    "phi_p": (0.1, 0.2, 0.3, 0.4, 0.5),
    "phi_g": (0.2, 0.3, 0.4, 0.5, 0.6),
    "phi_w": (0.01, 0.05, 0.1),
    "lambda0": (0.5, 0.6, 0.7, 0.8, 0.9, 1.0),
}


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    return int(np.random.SeedSequence().entropy)


def drop_plan(cfg: SwarmConfig, N: int, rng: np.random.Generator, ids: Sequence[int] | None = None) -> EvalSchedule:
    """Decide which utility evaluations this iteration skips (Drop-K / Drop-N)."""
    if cfg.d_k > 0 and cfg.d_n > 0:
        raise ConfigurationNotValid("Only one of 'd_k' and 'd_n' may be nonzero in a run")

    ids = list(range(N)) if ids is None else list(ids)

    if cfg.d_k > 0 and rng.random() < cfg.d_k:
        return EvalSchedule(skip_iteration=True, skipped_particles=ids)

    if cfg.d_n > 0:
        count = round(cfg.d_n * N)
        skipped = rng.choice(ids, size=count, replace=False) if count else []
        return EvalSchedule(skipped_particles=[int(particle_id) for particle_id in skipped])

    return EvalSchedule()


@attrs.define
class SearchResult:
    best: ParamVector
    f_best: float
    log: list[RunRecord]
    state: SwarmState
    seed: int


@attrs.define(frozen=True)
class GridRun:
    config: SwarmConfig
    f_best: float


@attrs.define
class GridResult:
    best_config: SwarmConfig
    best: ParamVector
    f_best: float
    runs: list[GridRun]

    def beats_baseline(self, baseline: float) -> float:
        """Fraction of runs whose best utility strictly exceeds ``baseline``."""
        return sum(run.f_best > baseline for run in self.runs) / len(self.runs)


def restore_state(record: RunRecord, cfg: SwarmConfig) -> SwarmState:
    """Rebuild the live swarm from the last record of a run log.

    Vectors come back at logged precision. A skipped or restarted particle
    carries its personal best utility as current utility.
    """
    particles = [
        Particle(
            id=particle.id,
            x=particle.vector("x"),
            v=particle.vector("v"),
            p=particle.vector("p"),
            f_x=particle.f_p if particle.restarted or particle.skipped else particle.f_x,
            f_p=particle.f_p,
            stagnation_count=particle.stagnation,
        )
        for particle in record.particles
    ]
    lambda_ = record.lambda_ if record.iteration == 0 else record.lambda_ * cfg.phi_lambda

    return SwarmState(
        particles=particles,
        g=np.asarray(record.g, dtype=np.float64),
        f_g=record.f_g,
        g_w=np.asarray(record.g_w, dtype=np.float64),
        f_gw=record.f_gw,
        g_provider=record.g_provider,
        gw_provider=record.gw_provider,
        iteration=record.iteration,
        lambda_=lambda_,
        g_stagnation=record.g_stagnation,
    )


class SwarmSearch:
    def __init__(
        self,
        utility: UtilityFnABC,
        cfg: SwarmConfig,
        sink: RecordSinkABC | None = None,
        rng: np.random.Generator | None = None,
        header: Mapping[str, Any] | None = None,
    ) -> None:
        self.utility = utility
        self.cfg = cfg
        self.sink = sink
        self.seed = resolve_seed(cfg.seed)
        self.rng = rng if rng is not None else np.random.default_rng(self.seed)
        self.header = dict(header or {})
        self.log: list[RunRecord] = []

    def search(self, experts: Sequence[Any]) -> SearchResult:
        if not experts:
            raise InvalidValueException("Cannot search without experts")

        vectors = [to_param_vector(expert, f"expert {i}") for i, expert in enumerate(experts)]
        check_same_dim(*vectors, names=[f"expert {i}" for i in range(len(vectors))])

        self._write_header(dim=int(vectors[0].shape[0]), n_experts=len(vectors))
        state = self.initialize(vectors)
        return self.resume(state)

    def initialize(self, experts: list[ParamVector]) -> SwarmState:
        locations = populate(experts, self.cfg.N, self.rng, disable_crossover=self.cfg.disable_crossover)
        velocities = [
            init_velocity(i, locations, self.rng, zero_init_velocity=self.cfg.zero_init_velocity)
            for i in range(len(locations))
        ]

        # Iteration 0 evaluates everyone: no drops, no tolerated failures.
        utilities = self._evaluate(dict(enumerate(locations)), tolerate=False)
        particles = [
            Particle(id=i, x=x, v=v, p=x.copy(), f_x=utilities[i], f_p=utilities[i])
            for i, (x, v) in enumerate(zip(locations, velocities))
        ]

        values = [particle.f_p for particle in particles]
        best, worst = int(np.argmax(values)), int(np.argmin(values))
        state = SwarmState(
            particles=particles,
            g=particles[best].x.copy(),
            f_g=values[best],
            g_w=particles[worst].x.copy(),
            f_gw=values[worst],
            g_provider=best,
            gw_provider=worst,
            lambda_=self.cfg.lambda0,
        )

        self._record(
            RunRecord(
                iteration=0,
                lambda_=state.lambda_,
                f_g=state.f_g,
                f_gw=state.f_gw,
                g_provider=state.g_provider,
                gw_provider=state.gw_provider,
                g=quantize(state.g),
                g_w=quantize(state.g_w),
                g_stagnation=0,
                particles=[ParticleRecord.capture(particle, particle.x, particle.f_x) for particle in particles],
            )
        )
        logger.info(
            "Swarm initialized",
            extra={"props": {"N": len(particles), "f_g": state.f_g, "f_gw": state.f_gw, "seed": self.seed}},
        )
        return state

    def resume(self, state: SwarmState) -> SearchResult:
        while state.iteration < self.cfg.K:
            if state.g_stagnation >= self.cfg.c:
                logger.info(
                    "Global best stagnated, stopping search",
                    extra={"props": {"iteration": state.iteration, "patience": self.cfg.c, "f_g": state.f_g}},
                )
                break
            self.step(state)

        return SearchResult(best=state.g.copy(), f_best=state.f_g, log=self.log, state=state, seed=self.seed)

    def step(self, state: SwarmState) -> tuple[SwarmState, RunRecord]:
        cfg = self.cfg
        ordered = sorted(state.particles, key=lambda particle: particle.id)
        ids = [particle.id for particle in ordered]
        g, g_w = state.g.copy(), state.g_w.copy()
        g_provider, gw_provider = state.g_provider, state.gw_provider

        schedule = drop_plan(cfg, len(ordered), self.rng, ids)
        draws = {particle.id: draw_randoms(cfg, self.rng) for particle in ordered}

        moves: dict[int, tuple[ParamVector, ParamVector]] = {}
        for particle in ordered:
            draw = draws[particle.id]
            velocity = update_velocity(particle, g, g_w, cfg, draw)
            moves[particle.id] = (update_location(particle.x, velocity, state.lambda_), velocity)

        pending = {particle_id: moves[particle_id][0] for particle_id in ids if not schedule.skips(particle_id)}
        utilities = self._evaluate(pending, tolerate=cfg.tolerate_eval_failure)

        improved = False
        for particle in ordered:
            particle.x, particle.v = moves[particle.id]
            particle.f_x = utilities.get(particle.id)

            if particle.f_x is not None and particle.f_x > particle.f_p:
                particle.p, particle.f_p = particle.x.copy(), particle.f_x
                particle.stagnation_count = 0
            else:
                particle.stagnation_count += 1

            if particle.f_x is None:
                continue
            if particle.f_x > state.f_g:
                state.g, state.f_g, state.g_provider = particle.x.copy(), particle.f_x, particle.id
                improved = True
            if particle.f_x < state.f_gw:
                state.g_w, state.f_gw, state.gw_provider = particle.x.copy(), particle.f_x, particle.id

        state.g_stagnation = 0 if improved else state.g_stagnation + 1

        restarts = []
        for particle in ordered:
            if particle.stagnation_count >= cfg.c_r:
                particle.x, particle.v = particle.p.copy(), np.zeros_like(particle.v)
                particle.f_x, particle.stagnation_count = particle.f_p, 0
                restarts.append(particle.id)

        record = RunRecord(
            iteration=state.iteration + 1,
            lambda_=state.lambda_,
            f_g=state.f_g,
            f_gw=state.f_gw,
            g_provider=state.g_provider,
            gw_provider=state.gw_provider,
            g=quantize(state.g),
            g_w=quantize(state.g_w),
            g_stagnation=state.g_stagnation,
            particles=[
                ParticleRecord.capture(
                    particle,
                    moves[particle.id][0],
                    utilities.get(particle.id),
                    restarted=particle.id in restarts,
                    contribution=step_contribution(cfg, draws[particle.id], state.lambda_, g_provider, gw_provider),
                )
                for particle in ordered
            ],
            restarts=restarts,
            injected=state.pending_injections,
            g_start=quantize(g),
            gw_start=quantize(g_w),
        )

        state.pending_injections = []
        state.lambda_ *= cfg.phi_lambda
        state.iteration += 1
        self._record(record)

        logger.info(
            "Swarm iteration finished",
            extra={
                "props": {
                    "iteration": state.iteration,
                    "f_g": state.f_g,
                    "f_gw": state.f_gw,
                    "lambda": state.lambda_,
                    "skipped": len(ordered) - len(pending),
                    "restarts": restarts,
                }
            },
        )
        return state, record

    def _evaluate(self, locations: dict[int, ParamVector], tolerate: bool) -> dict[int, float | None]:
        if self.cfg.workers > 1 and len(locations) > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.workers) as executor:
                futures = {
                    particle_id: executor.submit(self._evaluate_one, particle_id, x, tolerate)
                    for particle_id, x in locations.items()
                }
                return {particle_id: future.result() for particle_id, future in futures.items()}

        return {particle_id: self._evaluate_one(particle_id, x, tolerate) for particle_id, x in locations.items()}

    def _evaluate_one(self, particle_id: int, x: ParamVector, tolerate: bool) -> float | None:
        frozen = x.copy()
        frozen.flags.writeable = False

        try:
            value = float(self.utility(frozen))
            if not math.isfinite(value):
                raise EvaluationFailedException(f"utility '{self.utility.name}' returned {value}")
            return value
        except Exception as e:
            error = e if isinstance(e, EvaluationFailedException) else EvaluationFailedException(str(e))
            error.particle_id = particle_id

            if tolerate:
                logger.warning(
                    "Utility evaluation failed, treating it as skipped",
                    extra={"props": {"particle": particle_id, "exception": str(error)}},
                )
                return None

            logger.exception(
                "Utility evaluation failed, aborting the step",
                extra={"props": {"particle": particle_id, "exception": str(error)}},
            )
            if error is e:
                raise
            raise error from e

    def _write_header(self, **fields: Any) -> None:
        if self.sink is None:
            return
        self.sink.write_header(
            {"seed": self.seed, "config": self.cfg.evolve(seed=self.seed).dict, "utility": self.utility.name}
            | fields
            | self.header
        )

    def _record(self, record: RunRecord) -> None:
        self.log.append(record)
        if self.sink is not None:
            self.sink.write(record)


def grid_size(grid: Mapping[str, Sequence[float]]) -> int:
    return math.prod(len(values) for values in grid.values())


def grid_search(
    experts: Sequence[Any],
    utility: UtilityFnABC,
    grid: Mapping[str, Sequence[float]] = DEFAULT_GRID,
    budget: int = 200,
    seed: int | None = None,
    base: SwarmConfig | None = None,
) -> GridResult:
    """Sample ``budget`` configurations from ``grid`` and keep the best search."""
    if budget < 1:
        raise InvalidValueException(f"Grid budget must be >= 1, got {budget}")

    for axis, values in grid.items():
        if axis not in GRID_AXES:
            raise ConfigurationNotValid(f"Unknown grid axis '{axis}', expected one of {GRID_AXES}")
        if len(values) == 0:
            raise ConfigurationNotValid(f"Grid axis '{axis}' is empty")

    base = base or SwarmConfig()
    rng = np.random.default_rng(resolve_seed(seed))
    runs: list[GridRun] = []
    best: SearchResult | None = None
    best_config: SwarmConfig | None = None

    for run in range(budget):
        choice = {axis: float(values[int(rng.integers(len(values)))]) for axis, values in grid.items()}
        cfg = base.evolve(**choice, seed=int(rng.integers(2**32)))
        result = SwarmSearch(utility, cfg).search(experts)
        runs.append(GridRun(config=cfg, f_best=result.f_best))

        logger.info("Grid run finished", extra={"props": {"run": run, "f_best": result.f_best} | choice})

        if best is None or result.f_best > best.f_best:
            best, best_config = result, cfg

    return GridResult(best_config=best_config, best=best.best, f_best=best.f_best, runs=runs)
