import attrs
import numpy as np
import numpy.typing as npt

from model_swarms.application.exceptions import DimensionMismatchError, InvalidValueException

SIMPLEX_TOLERANCE = 1e-9


def _check_distribution_rows(matrix: npt.NDArray[np.float64], name: str) -> None:
    if (matrix < 0).any():
        raise InvalidValueException(f"{name} has negative probabilities")

    sums = matrix.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > SIMPLEX_TOLERANCE)
    if bad.size:
        raise InvalidValueException(f"{name} row {int(bad[0])} sums to {sums[bad[0]]!r}, not 1")


@attrs.define(frozen=True, eq=False)
class DistributionSet:
    """Next-token distributions of the ``n`` fixed experts for one context, shape (n, V)."""

    matrix: npt.NDArray[np.float64] = attrs.field(converter=lambda m: np.atleast_2d(np.asarray(m, dtype=np.float64)))

    def __attrs_post_init__(self) -> None:
        if self.matrix.ndim != 2 or 0 in self.matrix.shape:
            raise InvalidValueException("A distribution set needs at least one expert and one token")
        _check_distribution_rows(self.matrix, "Distribution set")

    @property
    def n_experts(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def vocab_size(self) -> int:
        return int(self.matrix.shape[1])


def check_targets(targets: list[npt.NDArray[np.float64]], contexts: list[DistributionSet]) -> None:
    if not contexts:
        raise InvalidValueException("At least one context is required")
    if len(targets) != len(contexts):
        raise DimensionMismatchError(f"{len(targets)} targets for {len(contexts)} contexts")

    n, vocab = contexts[0].n_experts, contexts[0].vocab_size
    for index, context in enumerate(contexts):
        if (context.n_experts, context.vocab_size) != (n, vocab):
            raise DimensionMismatchError(
                f"Context {index} has shape {(context.n_experts, context.vocab_size)}, expected {(n, vocab)}"
            )

    stacked = np.vstack(targets)
    if stacked.shape[1] != vocab:
        raise DimensionMismatchError(f"Targets have vocabulary {stacked.shape[1]}, contexts have {vocab}")
    _check_distribution_rows(stacked, "Targets")


def synthetic_distributions(
    n_experts: int, vocab: int, n_contexts: int, seed: int | None = 0, concentration: float = 1.0
) -> list[DistributionSet]:
    rng = np.random.default_rng(seed)
    return [DistributionSet(rng.dirichlet(np.full(vocab, concentration), size=n_experts)) for _ in range(n_contexts)]


def mixture_targets(
    contexts: list[DistributionSet], weights: npt.ArrayLike | None = None, seed: int | None = 0
) -> tuple[npt.NDArray[np.float64], list[npt.NDArray[np.float64]]]:
    """Targets that are the same convex mixture of the experts in every context.

    Returns the mixture weights (drawn from a flat Dirichlet when not given) and one target per context.
    """
    if not contexts:
        raise InvalidValueException("At least one context is required")

    n = contexts[0].n_experts
    if weights is None:
        weights = np.random.default_rng(seed).dirichlet(np.ones(n))
    weights = np.asarray(weights, dtype=np.float64).reshape(-1)

    if weights.shape[0] != n:
        raise DimensionMismatchError(f"{weights.shape[0]} mixture weights for {n} experts")
    if (weights < 0).any() or abs(weights.sum() - 1.0) > SIMPLEX_TOLERANCE:
        raise InvalidValueException("Mixture weights must be nonnegative and sum to 1")

    return weights, [weights @ context.matrix for context in contexts]
