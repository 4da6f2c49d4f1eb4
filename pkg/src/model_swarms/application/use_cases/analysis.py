import logging
from typing import Any, Sequence

import attrs
import numpy as np
import numpy.typing as npt

from model_swarms.application.exceptions import ConfigurationNotValid, DimensionMismatchError, InvalidValueException
from model_swarms.application.use_cases.search import SearchResult, SwarmSearch
from model_swarms.domain.models.analysis import CorrectnessMatrix, check_binary
from model_swarms.domain.models.records import SKIPPED, RunRecord
from model_swarms.domain.models.swarm_config import SwarmConfig
from model_swarms.domain.ports.sink import RecordSinkABC
from model_swarms.domain.ports.utility import UtilityFnABC

logger = logging.getLogger(f"model-swarms.{__name__}")

TRAJECTORY_HEADER = ("iteration", "particle", "coord_a", "coord_b", "f_x")


def correctness_level(row: npt.ArrayLike) -> int:
    """1: all wrong, 2: fewer than half right, 3: at least half right, 4: all right."""
    row = np.asarray(row).reshape(-1)

    if row.size == 0:
        raise InvalidValueException("Correctness row must not be empty")
    check_binary(row)

    correct = int(row.sum())
    if correct == 0:
        return 1
    if correct == row.size:
        return 4
    if 2 * correct < row.size:
        return 2
    return 3


def correctness_levels(matrix: CorrectnessMatrix) -> list[int]:
    return [correctness_level(row) for row in matrix.entries]


def _paired_levels(pre: CorrectnessMatrix, post: CorrectnessMatrix) -> tuple[list[int], list[int]]:
    if pre.shape != post.shape:
        raise DimensionMismatchError(f"Pre shape {pre.shape} differs from post shape {post.shape}")
    return correctness_levels(pre), correctness_levels(post)


def c_surge(pre: CorrectnessMatrix, post: CorrectnessMatrix) -> float:
    before, after = _paired_levels(pre, post)
    return sum(b > a for a, b in zip(before, after)) / len(before)


def c_emerge(pre: CorrectnessMatrix, post: CorrectnessMatrix) -> float | None:
    """Share of initially all-wrong questions later solved by someone; None without such questions."""
    before, after = _paired_levels(pre, post)
    impossible = [b for a, b in zip(before, after) if a == 1]

    if not impossible:
        return None
    return sum(level > 1 for level in impossible) / len(impossible)


def transition_counts(pre: CorrectnessMatrix, post: CorrectnessMatrix) -> list[list[int]]:
    before, after = _paired_levels(pre, post)
    counts = [[0] * 4 for _ in range(4)]
    for a, b in zip(before, after):
        counts[a - 1][b - 1] += 1
    return counts


@attrs.define
class DiversityRun:
    label: str
    result: SearchResult


def diversity_preset(
    experts: Sequence[Any],
    a: int,
    b: int,
    utility: UtilityFnABC,
    cfg: SwarmConfig,
    sink: RecordSinkABC | None = None,
    header: dict[str, Any] | None = None,
) -> DiversityRun:
    """Search from the first ``a`` experts, each repeated ``b`` times."""
    if a < 1 or b < 1:
        raise ConfigurationNotValid(f"Diversity preset needs a, b >= 1, got {a}x{b}")
    if a > len(experts):
        raise ConfigurationNotValid(f"Diversity preset asks for {a} distinct experts, only {len(experts)} given")
    if a * b != cfg.n_initial:
        raise ConfigurationNotValid(f"Diversity preset {a}x{b} does not match the population base {cfg.n_initial}")

    label = f"{a}x{b}"
    seeds = [experts[index] for index in range(a) for _ in range(b)]
    result = SwarmSearch(utility, cfg, sink=sink, header=(header or {}) | {"diversity": label}).search(seeds)

    logger.info("Diversity run finished", extra={"props": {"label": label, "f_best": result.f_best}})
    return DiversityRun(label=label, result=result)


def rank_report(log: Sequence[RunRecord]) -> int:
    """Starting rank (1 = best start) of the particle that ended with the best personal best."""
    if not log:
        raise InvalidValueException("Cannot rank an empty run log")

    records = sorted(log, key=lambda record: record.iteration)
    initial = {particle.id: particle.f_x for particle in records[0].particles}
    final = {particle.id: particle.f_p for particle in records[-1].particles if particle.id in initial}

    winner = min(final, key=lambda particle_id: (-final[particle_id], particle_id))
    start = initial[winner]
    return 1 + sum(
        value > start or (value == start and particle_id < winner) for particle_id, value in initial.items()
    )


def export_trajectory(log: Sequence[RunRecord], coordinates: tuple[int, int]) -> list[tuple]:
    """Rows for plotting two coordinates of every evaluated location, header first."""
    first, second = coordinates

    if first < 0 or second < 0:
        raise InvalidValueException(f"Coordinates must be nonnegative, got {coordinates}")

    rows: list[tuple] = [TRAJECTORY_HEADER]
    for record in sorted(log, key=lambda record: record.iteration):
        for particle in sorted(record.particles, key=lambda particle: particle.id):
            dim = len(particle.moved)
            if first >= dim or second >= dim:
                raise InvalidValueException(f"Coordinates {coordinates} out of range for dimension {dim}")
            rows.append(
                (
                    record.iteration,
                    particle.id,
                    particle.moved[first],
                    particle.moved[second],
                    SKIPPED if particle.f_x is None else particle.f_x,
                )
            )

    return rows
