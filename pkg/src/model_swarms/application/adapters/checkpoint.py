import logging
import struct
from pathlib import Path

import numpy as np

from model_swarms.application.exceptions import CheckpointFormatException
from model_swarms.domain.models.vector import ParamVector

logger = logging.getLogger(f"model-swarms.{__name__}")

MAGIC = b"MSWM"
VERSION = 1
# magic, u32 version, u64 dim; little-endian, no padding
HEADER = struct.Struct("<4sIQ")
FLOAT32_MAX = float(np.finfo(np.float32).max)


class CheckpointRepository:
    @classmethod
    def dumps(cls, x: ParamVector) -> bytes:
        values = np.asarray(x, dtype=np.float64).reshape(-1)
        if not np.isfinite(values).all() or (np.abs(values) > FLOAT32_MAX).any():
            raise CheckpointFormatException("Checkpoint values must be finite and within 32-bit float range", "payload")

        payload = values.astype("<f4")
        return HEADER.pack(MAGIC, VERSION, payload.shape[0]) + payload.tobytes()

    @classmethod
    def loads(cls, data: bytes) -> ParamVector:
        if len(data) < HEADER.size:
            raise CheckpointFormatException(f"Checkpoint header needs {HEADER.size} bytes, got {len(data)}", "header")

        magic, version, dim = HEADER.unpack_from(data)

        if magic != MAGIC:
            raise CheckpointFormatException(f"Checkpoint magic mismatch: expected {MAGIC!r}, got {magic!r}", "magic")
        if version != VERSION:
            raise CheckpointFormatException(f"Unsupported checkpoint version {version}, expected {VERSION}", "version")

        payload = data[HEADER.size :]
        if len(payload) != 4 * dim:
            raise CheckpointFormatException(
                f"Checkpoint payload has {len(payload)} bytes, dim {dim} needs {4 * dim}", "payload"
            )

        vector = np.frombuffer(payload, dtype="<f4").astype(np.float64)
        if not np.isfinite(vector).all():
            raise CheckpointFormatException("Checkpoint payload holds non-finite values", "payload")
        return vector

    @classmethod
    def save(cls, x: ParamVector, path: str | Path) -> None:
        try:
            Path(path).write_bytes(cls.dumps(x))
        except OSError as e:
            message = f"Error when trying to write checkpoint '{path}'"
            logger.exception(message, extra={"props": {"path": str(path), "exception": str(e)}})
            raise

    @classmethod
    def load(cls, path: str | Path) -> ParamVector:
        try:
            data = Path(path).read_bytes()
        except OSError as e:
            message = f"Error when trying to read checkpoint '{path}'"
            logger.exception(message, extra={"props": {"path": str(path), "exception": str(e)}})
            raise

        try:
            return cls.loads(data)
        except CheckpointFormatException as e:
            logger.error(
                "Checkpoint rejected",
                extra={"props": {"path": str(path), "field": e.field, "exception": str(e)}},
            )
            raise
