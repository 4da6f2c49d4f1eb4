"""Plain-text matrices: one row per line, whitespace-separated decimals."""
import logging
from pathlib import Path

import numpy as np
import numpy.typing as npt

from model_swarms.application.exceptions import InvalidValueException
from model_swarms.domain.models.analysis import CorrectnessMatrix
from model_swarms.domain.models.composition import DistributionSet

logger = logging.getLogger(f"model-swarms.{__name__}")


def load_matrix(path: str | Path) -> npt.NDArray[np.float64]:
    try:
        return np.loadtxt(path, dtype=np.float64, ndmin=2)
    except ValueError as e:
        logger.exception("Matrix file rejected", extra={"props": {"path": str(path), "exception": str(e)}})
        raise InvalidValueException(f"Matrix file '{path}' is not a rectangular matrix of reals") from e


def load_distribution_set(path: str | Path) -> DistributionSet:
    return DistributionSet(load_matrix(path))


def load_targets(path: str | Path) -> list[npt.NDArray[np.float64]]:
    return list(load_matrix(path))


def load_correctness_matrix(path: str | Path) -> CorrectnessMatrix:
    return CorrectnessMatrix(load_matrix(path))


def save_matrix(matrix: npt.ArrayLike, path: str | Path) -> None:
    np.savetxt(path, np.atleast_2d(matrix), fmt="%.17g")
