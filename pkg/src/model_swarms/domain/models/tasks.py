import attrs
import numpy as np
import numpy.typing as npt

from model_swarms.application.exceptions import InvalidValueException

CHECKPOINT_PLACEHOLDER = "{checkpoint}"


def _nonnegative_scores(instance, attribute, value) -> None:
    for index, score in enumerate(value):
        if score < 0:
            raise InvalidValueException(f"Task score {index} is negative ({score})")


@attrs.define(frozen=True)
class TaskScores:
    scores: tuple[float, ...] = attrs.field(converter=lambda values: tuple(float(v) for v in values))

    @scores.validator
    def _check(self, attribute, value) -> None:
        if not value:
            raise InvalidValueException("At least one task score is required")
        _nonnegative_scores(self, attribute, value)


@attrs.define(frozen=True)
class ExternalUtilitySpec:
    """Shell command scoring a checkpoint; ``{checkpoint}`` marks the file path."""

    command: str = attrs.field()
    workdir: str | None = attrs.field(default=None)
    timeout: float = attrs.field(default=600.0, converter=float)

    @command.validator
    def _one_placeholder(self, attribute, value) -> None:
        count = value.count(CHECKPOINT_PLACEHOLDER)
        if count != 1:
            raise InvalidValueException(
                f"External command must contain exactly one '{CHECKPOINT_PLACEHOLDER}' placeholder, found {count}"
            )

    @timeout.validator
    def _positive_timeout(self, attribute, value) -> None:
        if value <= 0:
            raise InvalidValueException(f"External timeout must be positive, got {value}")


@attrs.define(frozen=True, eq=False)
class LabeledDataset:
    features: npt.NDArray[np.float64]
    labels: npt.NDArray[np.int64]
    n_classes: int

    def __attrs_post_init__(self) -> None:
        if self.features.ndim != 2 or self.features.shape[0] == 0:
            raise InvalidValueException("Dataset features must be a nonempty 2-D array")
        if self.labels.shape != (self.features.shape[0],):
            raise InvalidValueException("Dataset needs exactly one label per sample")
        if self.labels.min() < 0 or self.labels.max() >= self.n_classes:
            raise InvalidValueException(f"Dataset labels must lie in [0, {self.n_classes})")

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    @property
    def particle_dim(self) -> int:
        return self.n_features * self.n_classes + self.n_classes


def synthetic_classification(
    n_per_class: int = 50,
    n_features: int = 2,
    n_classes: int = 2,
    separation: float = 4.0,
    seed: int | None = 0,
) -> LabeledDataset:
    """Gaussian blobs centred on scaled one-hot directions, balanced per class."""
    rng = np.random.default_rng(seed)
    centres = np.zeros((n_classes, n_features))

    for label in range(n_classes):
        centres[label, label % n_features] = separation * (1 if label < n_features else -1)

    features = np.concatenate([centre + rng.standard_normal((n_per_class, n_features)) for centre in centres])
    labels = np.repeat(np.arange(n_classes), n_per_class)
    return LabeledDataset(features=features, labels=labels, n_classes=n_classes)
