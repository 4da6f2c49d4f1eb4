from abc import ABC

from model_swarms.domain.models.vector import ParamVector


class UtilityFnABC(ABC):
    name: str = "utility"
    deterministic: bool = True

    def __call__(self, x: ParamVector) -> float:
        raise NotImplementedError
