import logging
from typing import Any, Sequence

import numpy as np

from model_swarms.application.exceptions import (
    DegenerateRenormalizationException,
    IncompleteLogException,
    InvalidValueException,
)
from model_swarms.domain.models.records import RunRecord, StepContribution
from model_swarms.domain.models.swarm import Particle, SwarmState
from model_swarms.domain.models.swarm_config import SwarmConfig
from model_swarms.domain.models.vector import ParamVector, check_same_dim, to_param_vector
from model_swarms.domain.ports.utility import UtilityFnABC
from model_swarms.domain.swarm_core import init_velocity

logger = logging.getLogger(f"model-swarms.{__name__}")

ROLES = frozenset({"g", "g_w"})


def inject_expert(
    state: SwarmState, new: Any, utility: UtilityFnABC, cfg: SwarmConfig, rng: np.random.Generator
) -> SwarmState:
    """Add ``new`` as a particle; it only reaches the others by becoming the global best.

    ``rng`` should be a stream of its own so the injection leaves the draws of
    the running search untouched.
    """
    new = to_param_vector(new, "injected expert")
    check_same_dim(state.g, new, names=("swarm", "injected expert"))

    value = float(utility(new))
    particle_id = state.next_id()
    locations = state.locations() + [new]
    velocity = init_velocity(len(locations) - 1, locations, rng, zero_init_velocity=cfg.zero_init_velocity)

    state.particles.append(Particle(id=particle_id, x=new, v=velocity, p=new.copy(), f_x=value, f_p=value))
    state.pending_injections.append(particle_id)

    if value > state.f_g:
        state.g, state.f_g, state.g_provider = new.copy(), value, particle_id
        state.g_stagnation = 0

    logger.info(
        "Expert injected",
        extra={"props": {"id": particle_id, "f": value, "f_g": state.f_g, "became_g": state.g_provider == particle_id}},
    )
    return state


def removed_roles(contribution: StepContribution, removed_id: int) -> set[str]:
    roles = set()
    if contribution.g_provider == removed_id:
        roles.add("g")
    if contribution.gw_provider == removed_id:
        roles.add("g_w")
    return roles


def remove_expert_step(
    x_t: ParamVector,
    contribution: StepContribution,
    removed: set[str],
    g_prev: ParamVector,
    gw_prev: ParamVector,
) -> ParamVector:
    """Strip the global best/worst terms of one location update and renormalize."""
    unknown = set(removed) - ROLES
    if unknown:
        raise InvalidValueException(f"Unknown roles {sorted(unknown)}, expected a subset of {sorted(ROLES)}")

    if not removed:
        return x_t.copy()

    check_same_dim(x_t, g_prev, gw_prev, names=("x_t", "g", "g_w"))
    total = contribution.total
    retained = total
    adjusted = x_t.copy()

    if "g" in removed:
        adjusted = adjusted - contribution.w_g * g_prev
        retained -= contribution.w_g
    if "g_w" in removed:
        adjusted = adjusted + contribution.w_w * gw_prev
        retained -= contribution.w_w

    if retained <= 0:
        raise DegenerateRenormalizationException(f"Retained weight sum is {retained}, cannot renormalize")

    return (total / retained) * adjusted


def _check_complete(log: Sequence[RunRecord]) -> None:
    if not log:
        raise IncompleteLogException("Run log has no records", missing=[0])

    seen = {record.iteration for record in log}
    last = max(seen)
    missing = sorted(set(range(last + 1)) - seen)
    if missing:
        raise IncompleteLogException(f"Run log is missing iterations {missing}", missing=missing)

    for record in log:
        if record.iteration == 0:
            continue
        lacking = [particle.id for particle in record.particles if particle.contribution is None]
        if lacking:
            raise IncompleteLogException(
                f"Iteration {record.iteration} lacks step contributions for particles {lacking}",
                missing=[record.iteration],
            )


def replay_removal(log: Sequence[RunRecord], removed_id: int) -> dict[int, ParamVector]:
    """Counterfactual final locations of every particle except ``removed_id``.

    Velocities and personal bests are read from the log; only the locations
    are threaded forward. A restart snaps the particle back to its logged
    personal best.
    """
    _check_complete(log)
    records = sorted(log, key=lambda record: record.iteration)
    adjusted = {particle.id: particle.vector("x") for particle in records[0].particles}
    offsets: dict[int, ParamVector] = {}

    for previous, record in zip(records, records[1:]):
        g_prev = np.asarray(previous.g if record.g_start is None else record.g_start)
        gw_prev = np.asarray(previous.g_w if record.gw_start is None else record.gw_start)

        for particle in record.particles:
            if particle.id == removed_id:
                continue

            moved = particle.vector("moved")
            offset = offsets.get(particle.id)
            threaded = moved if offset is None else moved + particle.contribution.w_x * offset
            roles = removed_roles(particle.contribution, removed_id)
            location = remove_expert_step(threaded, particle.contribution, roles, g_prev, gw_prev)

            if particle.restarted:
                adjusted[particle.id] = particle.vector("x")
                offsets.pop(particle.id, None)
            else:
                adjusted[particle.id] = location
                if roles or offset is not None:
                    offsets[particle.id] = location - moved

    adjusted.pop(removed_id, None)
    logger.info(
        "Removal replayed",
        extra={"props": {"removed": removed_id, "iterations": len(records) - 1, "adjusted": len(offsets)}},
    )
    return dict(sorted(adjusted.items()))


def uniform_soup(experts: Sequence[Any]) -> ParamVector:
    if not experts:
        raise InvalidValueException("A soup needs at least one expert")

    vectors = [to_param_vector(expert, f"expert {i}") for i, expert in enumerate(experts)]
    check_same_dim(*vectors, names=[f"expert {i}" for i in range(len(vectors))])
    return np.mean(vectors, axis=0)


def best_single(experts: Sequence[Any], utility: UtilityFnABC) -> tuple[int, ParamVector, float]:
    if not experts:
        raise InvalidValueException("Need at least one expert")

    vectors = [to_param_vector(expert, f"expert {i}") for i, expert in enumerate(experts)]
    check_same_dim(*vectors, names=[f"expert {i}" for i in range(len(vectors))])
    scores = [float(utility(vector)) for vector in vectors]
    index = int(np.argmax(scores))
    return index, vectors[index], scores[index]


def greedy_soup(experts: Sequence[Any], utility: UtilityFnABC) -> ParamVector:
    """Average experts in by descending utility, keeping each one that does not hurt."""
    if not experts:
        raise InvalidValueException("A soup needs at least one expert")

    vectors = [to_param_vector(expert, f"expert {i}") for i, expert in enumerate(experts)]
    check_same_dim(*vectors, names=[f"expert {i}" for i in range(len(vectors))])

    scores = [float(utility(vector)) for vector in vectors]
    order = sorted(range(len(vectors)), key=lambda index: -scores[index])

    members = [order[0]]
    soup, soup_score = vectors[order[0]].copy(), scores[order[0]]

    for index in order[1:]:
        candidate = np.mean([vectors[member] for member in members + [index]], axis=0)
        candidate_score = float(utility(candidate))

        if candidate_score >= soup_score:
            members.append(index)
            soup, soup_score = candidate, candidate_score

    logger.info("Greedy soup cooked", extra={"props": {"members": members, "utility": soup_score}})
    return soup
