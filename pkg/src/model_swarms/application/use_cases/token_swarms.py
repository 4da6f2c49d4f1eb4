import logging
from typing import Sequence

import attrs
import numpy as np
import numpy.typing as npt
from scipy.special import rel_entr

from model_swarms.application.exceptions import DimensionMismatchError, InvalidValueException
from model_swarms.application.use_cases.search import SwarmSearch
from model_swarms.domain.models.composition import SIMPLEX_TOLERANCE, DistributionSet, check_targets
from model_swarms.domain.models.swarm_config import SwarmConfig
from model_swarms.domain.models.vector import ParamVector
from model_swarms.domain.ports.sink import RecordSinkABC
from model_swarms.domain.ports.utility import UtilityFnABC

logger = logging.getLogger(f"model-swarms.{__name__}")

# Unbounded KL (target mass where the composition has none) is capped to keep utilities finite.
KL_CEILING = 1e6
PROJECTION_TOLERANCE = 1e-12


def project_row(row: npt.ArrayLike) -> ParamVector:
    """Clip negatives and renormalize onto the probability simplex.

    Rows already on the simplex come back unchanged, which makes the
    projection idempotent bit for bit. An all-nonpositive row maps to uniform.
    """
    row = np.asarray(row, dtype=np.float64).reshape(-1)

    if row.size == 0:
        raise InvalidValueException("Cannot project an empty composition row")

    if (row >= 0).all() and abs(row.sum() - 1.0) <= PROJECTION_TOLERANCE:
        return row.copy()

    clipped = np.clip(row, 0.0, None)
    total = clipped.sum()

    if total == 0:
        return np.full(row.size, 1.0 / row.size)

    return clipped / total


def compose(row: npt.ArrayLike, dists: DistributionSet) -> ParamVector:
    row = np.asarray(row, dtype=np.float64).reshape(-1)

    if row.size != dists.n_experts:
        raise DimensionMismatchError(f"Composition row has {row.size} weights for {dists.n_experts} experts")
    if (row < 0).any() or abs(row.sum() - 1.0) > SIMPLEX_TOLERANCE:
        raise InvalidValueException("Composition row is not on the probability simplex; project it first")

    return row @ dists.matrix


def kl_divergence(target: ParamVector, composed: ParamVector) -> float:
    return float(min(rel_entr(target, composed).sum(), KL_CEILING))


class CompositionUtility(UtilityFnABC):
    """Negative mean KL(target || composed) across contexts of a projected row."""

    name = "token_kl"
    deterministic = True

    def __init__(self, contexts: Sequence[DistributionSet], targets: Sequence[npt.ArrayLike]) -> None:
        self.contexts = list(contexts)
        self.targets = [np.asarray(target, dtype=np.float64).reshape(-1) for target in targets]
        check_targets(self.targets, self.contexts)

    def __call__(self, x: ParamVector) -> float:
        row = project_row(x)
        divergences = [
            kl_divergence(target, compose(row, context)) for target, context in zip(self.targets, self.contexts)
        ]
        return -float(np.mean(divergences))


@attrs.define
class TokenSearchResult:
    row: ParamVector
    score: float
    pure_scores: list[float]


def token_search(
    dists_per_context: Sequence[DistributionSet],
    targets: Sequence[npt.ArrayLike],
    cfg: SwarmConfig,
    sink: RecordSinkABC | None = None,
) -> TokenSearchResult:
    """Search composition weights over fixed experts, starting from the identity rows."""
    utility = CompositionUtility(dists_per_context, targets)
    n = utility.contexts[0].n_experts

    if cfg.N < n:
        cfg = cfg.evolve(N=n, n_initial=n)
        logger.warning("Swarm size raised to the number of experts", extra={"props": {"N": n}})

    identity = list(np.eye(n))
    search = SwarmSearch(utility, cfg.evolve(n_initial=n), sink=sink, header={"variant": "token"})
    result = search.search(identity)

    pure_scores = [utility(row) for row in identity]
    logger.info(
        "Token search finished",
        extra={"props": {"score": result.f_best, "best_pure": max(pure_scores), "iterations": len(result.log) - 1}},
    )
    return TokenSearchResult(row=project_row(result.best), score=result.f_best, pure_scores=pure_scores)
