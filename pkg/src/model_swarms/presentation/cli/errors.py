import functools
import json
import logging
import sys
from typing import Any, Callable

import click

from model_swarms.application.exceptions import (
    CheckpointFormatException,
    ConfigurationNotValid,
    DegenerateRenormalizationException,
    DimensionMismatchError,
    EvaluationFailedException,
    IncompleteLogException,
    InvalidValueException,
    ZeroNormalizerException,
)

logger = logging.getLogger(f"model-swarms.{__name__}")

HANDLED_ERRORS = (
    CheckpointFormatException,
    ConfigurationNotValid,
    DegenerateRenormalizationException,
    DimensionMismatchError,
    EvaluationFailedException,
    IncompleteLogException,
    InvalidValueException,
    ZeroNormalizerException,
    OSError,
)


def error_payload(error: BaseException) -> dict[str, str]:
    return {"error": type(error).__name__, "message": str(error)}


def handle_errors(command: Callable[..., Any]) -> Callable[..., Any]:
    """Report known failures as a single JSON line on stderr and exit with status 1."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except HANDLED_ERRORS as e:
            logger.debug("Command failed", extra={"props": {"command": command.__name__, "exception": str(e)}})
            click.echo(json.dumps(error_payload(e)), err=True)
            sys.exit(1)

    return wrapper


def emit(document: dict[str, Any]) -> None:
    click.echo(json.dumps(document))
