class ConfigurationNotValid(Exception):
    pass


class DimensionMismatchError(Exception):
    pass


class InvalidValueException(Exception):
    pass


class ZeroNormalizerException(Exception):
    pass


class EvaluationFailedException(Exception):
    def __init__(self, message: str, particle_id: int | None = None, stderr: str = "") -> None:
        super().__init__(message)
        self.particle_id = particle_id
        self.stderr = stderr

    def __str__(self) -> str:
        message = super().__str__()

        if self.particle_id is not None:
            message = f"particle {self.particle_id}: {message}"
        if self.stderr:
            message = f"{message} (stderr: {self.stderr.strip()})"

        return message


class CheckpointFormatException(Exception):
    def __init__(self, message: str, field: str) -> None:
        super().__init__(message)
        self.field = field


class IncompleteLogException(Exception):
    def __init__(self, message: str, missing: list[int] | None = None) -> None:
        super().__init__(message)
        self.missing = missing or []


class DegenerateRenormalizationException(Exception):
    pass
