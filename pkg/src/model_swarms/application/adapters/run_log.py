import json
import logging
from pathlib import Path
from typing import Any

import attrs
import jsonschema

from model_swarms.application.exceptions import IncompleteLogException
from model_swarms.domain.models.records import RunRecord
from model_swarms.domain.ports.sink import RecordSinkABC

logger = logging.getLogger(f"model-swarms.{__name__}")

HEADER_TYPE = "header"

_vector = {"type": "array", "items": {"type": "number"}}
_contribution = {
    "type": ["object", "null"],
    "required": ["w_v", "w_p", "w_x", "w_g", "w_w", "g_provider", "gw_provider"],
}

RECORD_SCHEMA = {
    "type": "object",
    "required": [
        "iteration",
        "lambda",
        "f_g",
        "f_gw",
        "g_provider",
        "gw_provider",
        "g",
        "g_w",
        "g_stagnation",
        "particles",
    ],
    "properties": {
        "iteration": {"type": "integer", "minimum": 0},
        "g": _vector,
        "g_w": _vector,
        "g_start": {"type": ["array", "null"], "items": {"type": "number"}},
        "gw_start": {"type": ["array", "null"], "items": {"type": "number"}},
        "particles": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "x", "v", "p", "moved", "f_x", "f_p", "stagnation"],
                "properties": {
                    "x": _vector,
                    "v": _vector,
                    "p": _vector,
                    "moved": _vector,
                    "f_x": {"type": ["number", "string"]},
                    "contribution": _contribution,
                },
            },
        },
    },
}


def _dumps(document: dict[str, Any]) -> str:
    return json.dumps(document, separators=(",", ":"))


class JsonlRecordSink(RecordSinkABC):
    """One JSON document per line: an optional header, then one record per iteration."""

    def __init__(self, path: str | Path, append: bool = False) -> None:
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if not append:
            self.path.write_text("")

    def write_header(self, header: dict[str, Any]) -> None:
        self._append({"type": HEADER_TYPE} | header)

    def write(self, record: RunRecord) -> None:
        self._append(record.dict)

    def _append(self, document: dict[str, Any]) -> None:
        with self.path.open("a") as stream:
            stream.write(_dumps(document) + "\n")


class MemoryRecordSink(RecordSinkABC):
    def __init__(self) -> None:
        self.header: dict[str, Any] = {}
        self.records: list[RunRecord] = []

    def write_header(self, header: dict[str, Any]) -> None:
        self.header = dict(header)

    def write(self, record: RunRecord) -> None:
        self.records.append(record)


@attrs.define
class RunLog:
    header: dict[str, Any]
    records: list[RunRecord]


class RunLogRepository:
    @classmethod
    def load(cls, path: str | Path) -> RunLog:
        header: dict[str, Any] = {}
        records: list[RunRecord] = []

        try:
            lines = Path(path).read_text().splitlines()
        except OSError as e:
            logger.exception(
                "Error when trying to read a run log", extra={"props": {"path": str(path), "exception": str(e)}}
            )
            raise

        for number, line in enumerate(lines, start=1):
            if not line.strip():
                continue

            try:
                document = json.loads(line)
                if document.get("type") == HEADER_TYPE:
                    header = {key: value for key, value in document.items() if key != "type"}
                    continue
                jsonschema.validate(document, RECORD_SCHEMA)
            except (json.JSONDecodeError, jsonschema.ValidationError) as e:
                message = f"Run log '{path}' line {number} is not a valid record"
                logger.exception(message, extra={"props": {"path": str(path), "line": number, "exception": str(e)}})
                raise IncompleteLogException(f"{message}: {getattr(e, 'message', e)}") from e

            records.append(RunRecord.from_dict(document))

        return RunLog(header=header, records=records)
