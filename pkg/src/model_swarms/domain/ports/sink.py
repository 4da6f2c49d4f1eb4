from abc import ABC
from typing import Any

from model_swarms.domain.models.records import RunRecord


class RecordSinkABC(ABC):
    def write_header(self, header: dict[str, Any]) -> None:
        raise NotImplementedError

    def write(self, record: RunRecord) -> None:
        raise NotImplementedError
