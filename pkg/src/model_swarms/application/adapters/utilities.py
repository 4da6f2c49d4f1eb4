"""Concrete utility functions. Every utility is maximized; test landscapes are negated."""
import logging
import os
import re
import shlex
import subprocess
import tempfile
from typing import Sequence

import numpy as np

from model_swarms.application.adapters.checkpoint import CheckpointRepository
from model_swarms.application.exceptions import (
    DimensionMismatchError,
    EvaluationFailedException,
    InvalidValueException,
)
from model_swarms.domain.models.tasks import CHECKPOINT_PLACEHOLDER, ExternalUtilitySpec, LabeledDataset, TaskScores
from model_swarms.domain.models.vector import ParamVector, check_finite, to_param_vector
from model_swarms.domain.ports.utility import UtilityFnABC

logger = logging.getLogger(f"model-swarms.{__name__}")

DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def sphere(x: ParamVector) -> float:
    x = _landscape_input(x)
    return -float(np.sum(x**2))


def rastrigin(x: ParamVector) -> float:
    x = _landscape_input(x)
    d = x.shape[0]
    return -float(10 * d + np.sum(x**2 - 10 * np.cos(2 * np.pi * x)))


def rosenbrock(x: ParamVector) -> float:
    x = _landscape_input(x)
    if x.shape[0] < 2:
        raise InvalidValueException("rosenbrock needs at least two coordinates")
    return -float(np.sum(100 * (x[1:] - x[:-1] ** 2) ** 2 + (1 - x[:-1]) ** 2))


def _landscape_input(x: ParamVector) -> ParamVector:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] < 1:
        raise InvalidValueException("Landscapes need at least one coordinate")
    check_finite(x, "landscape input")
    return x


LANDSCAPES = {"sphere": sphere, "rastrigin": rastrigin, "rosenbrock": rosenbrock}


class LandscapeUtility(UtilityFnABC):
    deterministic = True

    def __init__(self, name: str) -> None:
        if name not in LANDSCAPES:
            raise InvalidValueException(f"Unknown landscape '{name}', expected one of {sorted(LANDSCAPES)}")
        self.name = name
        self._landscape = LANDSCAPES[name]

    def __call__(self, x: ParamVector) -> float:
        return self._landscape(x)


def harmonic_mean_utility(parts: TaskScores | Sequence[float]) -> float:
    """Harmonic mean of per-task scores; any zero score gives 0."""
    if not isinstance(parts, TaskScores):
        parts = TaskScores(parts)

    scores = parts.scores
    if any(score == 0 for score in scores):
        return 0.0
    return len(scores) / sum(1.0 / score for score in scores)


class JointUtility(UtilityFnABC):
    """Harmonic mean of several task utilities evaluated on the same particle."""

    def __init__(self, utilities: Sequence[UtilityFnABC]) -> None:
        if not utilities:
            raise InvalidValueException("A joint utility needs at least one task utility")
        self.utilities = list(utilities)
        self.name = "joint(" + ",".join(utility.name for utility in self.utilities) + ")"
        self.deterministic = all(utility.deterministic for utility in self.utilities)

    def __call__(self, x: ParamVector) -> float:
        scores = [float(utility(x)) for utility in self.utilities]

        try:
            return harmonic_mean_utility(TaskScores(scores))
        except InvalidValueException as e:
            raise EvaluationFailedException(f"joint utility got task scores {scores}") from e


def joint_utility(utilities: Sequence[UtilityFnABC]) -> JointUtility:
    return JointUtility(utilities)


class LinearProbeUtility(UtilityFnABC):
    """Accuracy of the linear classifier whose weights and biases are the particle.

    Layout: ``n_classes x n_features`` weights row-major, then ``n_classes`` biases.
    Score ties go to the lowest class index.
    """

    name = "linear_probe"
    deterministic = True

    def __init__(self, dataset: LabeledDataset, dim: int | None = None) -> None:
        if dim is not None and dim != dataset.particle_dim:
            raise DimensionMismatchError(
                f"Particles of dimension {dim} cannot encode a {dataset.n_classes}-class probe over "
                f"{dataset.n_features} features (needs {dataset.particle_dim})"
            )
        self.dataset = dataset

    def __call__(self, x: ParamVector) -> float:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        dataset = self.dataset

        if x.shape[0] != dataset.particle_dim:
            raise DimensionMismatchError(f"Probe particle has dimension {x.shape[0]}, expected {dataset.particle_dim}")

        split = dataset.n_classes * dataset.n_features
        weights = x[:split].reshape(dataset.n_classes, dataset.n_features)
        biases = x[split:]
        predictions = np.argmax(dataset.features @ weights.T + biases, axis=1)
        return float(np.mean(predictions == dataset.labels))


def linear_probe_utility(dataset: LabeledDataset, dim: int | None = None) -> LinearProbeUtility:
    return LinearProbeUtility(dataset, dim)


class ExternalUtility(UtilityFnABC):
    """Scores a particle by running a shell command on its checkpoint file.

    The value is the last line of standard output, parsed as a decimal real.
    """

    name = "external"
    deterministic = False

    def __init__(self, spec: ExternalUtilitySpec) -> None:
        self.spec = spec

    def __call__(self, x: ParamVector) -> float:
        x = to_param_vector(x, "particle")
        handle, path = tempfile.mkstemp(suffix=".mswm")
        os.close(handle)

        try:
            CheckpointRepository.save(x, path)
            command = self.spec.command.replace(CHECKPOINT_PLACEHOLDER, shlex.quote(path))
            logger.debug("Running external utility", extra={"props": {"command": command}})

            try:
                completed = subprocess.run(
                    command,
                    shell=True,
                    cwd=self.spec.workdir,
                    capture_output=True,
                    text=True,
                    timeout=self.spec.timeout,
                )
            except subprocess.TimeoutExpired as e:
                raise EvaluationFailedException(
                    f"external utility timed out after {self.spec.timeout}s", stderr=_text(e.stderr)
                ) from e

            if completed.returncode != 0:
                raise EvaluationFailedException(
                    f"external utility exited with status {completed.returncode}", stderr=completed.stderr
                )

            return _parse_last_line(completed.stdout, completed.stderr)
        finally:
            if os.path.exists(path):
                os.remove(path)


def _text(stream: bytes | str | None) -> str:
    if stream is None:
        return ""
    if isinstance(stream, bytes):
        return stream.decode(errors="replace")
    return stream


def _parse_last_line(stdout: str, stderr: str) -> float:
    lines = stdout.rstrip("\r\n").splitlines()
    last = lines[-1].strip() if lines else ""

    if not DECIMAL.match(last):
        raise EvaluationFailedException(f"cannot parse a decimal from the last output line {last!r}", stderr=stderr)

    return float(last)


def external_utility(spec: ExternalUtilitySpec) -> ExternalUtility:
    return ExternalUtility(spec)
