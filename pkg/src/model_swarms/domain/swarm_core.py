"""Per-particle arithmetic of the swarm search.

Every function here is pure given its inputs; randomness only enters through an
explicit ``numpy.random.Generator`` or a :class:`RandomDraw`.
"""
import logging

import numpy as np

from model_swarms.application.exceptions import InvalidValueException, ZeroNormalizerException
from model_swarms.domain.models.records import StepContribution
from model_swarms.domain.models.swarm import Particle, RandomDraw
from model_swarms.domain.models.swarm_config import SwarmConfig
from model_swarms.domain.models.vector import ParamVector, check_finite, check_same_dim

logger = logging.getLogger(f"model-swarms.{__name__}")


def interpolate(a: ParamVector, b: ParamVector, t: float) -> ParamVector:
    check_same_dim(a, b, names=("a", "b"))

    if not 0.0 <= t <= 1.0:
        raise InvalidValueException(f"Interpolation weight t must be in [0, 1], got {t}")

    return t * a + (1.0 - t) * b


def populate(
    experts: list[ParamVector], N: int, rng: np.random.Generator, disable_crossover: bool = False
) -> list[ParamVector]:
    """Grow ``experts`` to ``N`` starting locations by pairwise crossover.

    Parents of one child are two distinct experts; pairs are drawn with
    replacement across children.
    """
    if not experts:
        raise InvalidValueException("At least one expert is required to populate a swarm")

    check_same_dim(*experts, names=[f"expert {i}" for i in range(len(experts))])
    n = len(experts)

    if N < n:
        raise InvalidValueException(f"Swarm size N={N} is smaller than the {n} experts given")

    population = [expert.copy() for expert in experts]

    if n == 1 and N > 1 and not disable_crossover:
        logger.warning(
            "Crossover degenerates to duplication with a single expert",
            extra={"props": {"experts": n, "N": N}},
        )

    for _ in range(N - n):
        if disable_crossover or n == 1:
            population.append(experts[int(rng.integers(n))].copy())
            continue

        a, b = rng.choice(n, size=2, replace=False)
        t = float(rng.random())
        population.append(interpolate(experts[int(a)], experts[int(b)], t))

    return population


def init_velocity(
    i: int, locations: list[ParamVector], rng: np.random.Generator, zero_init_velocity: bool = False
) -> ParamVector:
    """Point particle ``i`` at a uniformly drawn particle (itself included)."""
    if not locations:
        raise InvalidValueException("Cannot initialize a velocity without locations")

    if zero_init_velocity:
        return np.zeros_like(locations[i], dtype=np.float64)

    j = int(rng.integers(len(locations)))
    check_same_dim(locations[i], locations[j], names=(f"location {i}", f"location {j}"))
    return locations[j] - locations[i]


def draw_randoms(cfg: SwarmConfig, rng: np.random.Generator) -> RandomDraw:
    if cfg.deterministic_randoms:
        return RandomDraw.ones()

    if cfg.walk_low < 0:
        r_v, r_p, r_g, r_w = rng.uniform(cfg.walk_low, 1.0, size=4)
    else:
        r_v, r_p, r_g, r_w = rng.random(4)
    return RandomDraw(r_v, r_p, r_g, r_w)


def _normalizer(cfg: SwarmConfig, draw: RandomDraw) -> tuple[float, float, float, float, float]:
    if cfg.deterministic_randoms:
        draw = RandomDraw.ones()

    terms = (draw.r_v * cfg.phi_v, draw.r_p * cfg.phi_p, draw.r_g * cfg.phi_g, draw.r_w * cfg.phi_w)
    C = sum(terms)

    if C == 0:
        raise ZeroNormalizerException(
            "Velocity normalizer C = r_v*phi_v + r_p*phi_p + r_g*phi_g + r_w*phi_w is zero"
        )

    return (*terms, C)


def update_velocity(
    particle: Particle, g: ParamVector, g_w: ParamVector, cfg: SwarmConfig, draw: RandomDraw
) -> ParamVector:
    check_same_dim(particle.x, particle.v, particle.p, g, g_w, names=("x", "v", "p", "g", "g_w"))
    inertia, cognitive, social, repel, C = _normalizer(cfg, draw)
    x = particle.x

    return (1.0 / C) * (inertia * particle.v + cognitive * (particle.p - x) + social * (g - x) - repel * (g_w - x))


def update_location(x: ParamVector, v: ParamVector, lambda_: float) -> ParamVector:
    check_same_dim(x, v, names=("x", "v"))

    if not lambda_ > 0:
        raise InvalidValueException(f"Step length must be positive, got {lambda_}")

    moved = x + lambda_ * v
    check_finite(moved, "updated location")
    return moved


def step_contribution(
    cfg: SwarmConfig, draw: RandomDraw, lambda_: float, g_provider: int, gw_provider: int
) -> StepContribution:
    """Weights of the expanded location update for one particle and step."""
    inertia, cognitive, social, repel, C = _normalizer(cfg, draw)
    w_v = lambda_ * inertia / C
    w_p = lambda_ * cognitive / C
    w_g = lambda_ * social / C
    w_w = lambda_ * repel / C

    return StepContribution(
        w_v=w_v,
        w_p=w_p,
        w_x=1.0 - (w_p + w_g - w_w),
        w_g=w_g,
        w_w=w_w,
        g_provider=g_provider,
        gw_provider=gw_provider,
    )
