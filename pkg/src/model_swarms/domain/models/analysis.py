import attrs
import numpy as np
import numpy.typing as npt

from model_swarms.application.exceptions import InvalidValueException


def check_binary(values: npt.NDArray, name: str = "row") -> None:
    if not np.isin(values, (0, 1)).all():
        raise InvalidValueException(f"{name} must contain only 0/1 entries")


@attrs.define(frozen=True, eq=False)
class CorrectnessMatrix:
    """Rows are questions, columns are experts, 1 marks a correct answer."""

    entries: npt.NDArray[np.int64] = attrs.field(converter=lambda m: np.asarray(m))

    def __attrs_post_init__(self) -> None:
        if self.entries.ndim != 2 or self.entries.shape[0] == 0 or self.entries.shape[1] == 0:
            raise InvalidValueException("A correctness matrix needs at least one question and one expert")
        check_binary(self.entries, "Correctness matrix")

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(self.entries.shape)
