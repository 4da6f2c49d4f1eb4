from typing import Iterable, Sequence

import numpy as np
import numpy.typing as npt

from model_swarms.application.exceptions import DimensionMismatchError, InvalidValueException

ParamVector = npt.NDArray[np.float64]


def to_param_vector(values: Iterable[float] | npt.ArrayLike, name: str = "vector") -> ParamVector:
    """Copy ``values`` into a flat float64 vector, rejecting NaN and infinity."""
    vector = np.array(values, dtype=np.float64).reshape(-1)
    check_finite(vector, name)
    return vector


def check_finite(vector: ParamVector, name: str = "vector") -> None:
    finite = np.isfinite(vector)

    if not finite.all():
        index = int(np.argmin(finite))
        raise InvalidValueException(f"{name} has a non-finite value {vector[index]!r} at coordinate {index}")


def check_same_dim(*vectors: ParamVector, names: Sequence[str] | None = None) -> int:
    dims = [int(vector.shape[0]) for vector in vectors]

    if len(set(dims)) > 1:
        labels = names or [f"vector {i}" for i in range(len(vectors))]
        described = ", ".join(f"{label}={dim}" for label, dim in zip(labels, dims))
        raise DimensionMismatchError(f"Dimension mismatch: {described}")

    return dims[0] if dims else 0


def quantize(vector: ParamVector) -> list[float]:
    """32-bit rendition used by run logs and checkpoints."""
    return np.asarray(vector, dtype=np.float32).astype(np.float64).tolist()
