import shlex
import struct
import sys

import numpy as np
import pytest

from model_swarms.application.adapters.utilities import (
    ExternalUtility,
    JointUtility,
    LandscapeUtility,
    LinearProbeUtility,
    harmonic_mean_utility,
    joint_utility,
    linear_probe_utility,
    rastrigin,
    rosenbrock,
    sphere,
)
from model_swarms.application.exceptions import (
    DimensionMismatchError,
    EvaluationFailedException,
    InvalidValueException,
)
from model_swarms.domain.models.tasks import ExternalUtilitySpec, synthetic_classification
from tests.doubles.stub import FunctionUtility

# prints the first float32 after the checkpoint header
FIRST_COORDINATE = (
    "import struct, sys; data = open(sys.argv[1], 'rb').read(); "
    "print(struct.unpack_from('<f', data, struct.calcsize('<4sIQ'))[0])"
)


def test_landscape_optima():
    assert 0.0 == sphere(np.zeros(4))
    assert 0.0 == rastrigin(np.zeros(4))
    assert 0.0 == rosenbrock(np.ones(2))


def test_landscapes_are_negated():
    assert sphere(np.ones(3)) < 0
    assert rastrigin(np.full(3, 0.5)) < 0
    assert rosenbrock(np.zeros(2)) < 0


def test_landscape_rejects_non_finite_input():
    with pytest.raises(InvalidValueException):
        sphere(np.array([0.0, np.inf]))


def test_unknown_landscape():
    with pytest.raises(InvalidValueException):
        LandscapeUtility("ackley")


@pytest.mark.parametrize(
    "scores, expected",
    [
        ([0.5, 0.5], 0.5),
        ([1.0, 0.0], 0.0),
        ([0.4, 0.6], 0.48),
    ],
)
def test_harmonic_mean(scores, expected):
    assert expected == pytest.approx(harmonic_mean_utility(scores), abs=1e-12)


def test_harmonic_mean_rejects_negative_score():
    with pytest.raises(InvalidValueException):
        harmonic_mean_utility([0.5, -0.5])


def test_joint_utility_combines_tasks():
    joint = joint_utility([FunctionUtility(lambda x: 0.4, "a"), FunctionUtility(lambda x: 0.6, "b")])

    assert 0.48 == pytest.approx(joint(np.zeros(1)), abs=1e-12)
    assert "joint(a,b)" == joint.name


def test_joint_utility_negative_task_score_fails_evaluation():
    joint = JointUtility([FunctionUtility(lambda x: -1.0)])

    with pytest.raises(EvaluationFailedException):
        joint(np.zeros(1))


def _separable_dataset():
    return synthetic_classification(n_per_class=40, n_features=2, n_classes=2, separation=6.0, seed=3)


def _separator(dataset):
    # class 0 sits at +6 on feature 0, class 1 at +6 on feature 1
    weights = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return np.concatenate([weights.reshape(-1), np.zeros(2)])


def test_linear_classifier_optimal_separator_is_perfect():
    dataset = _separable_dataset()

    assert 1.0 == LinearProbeUtility(dataset)(_separator(dataset))


def test_linear_classifier_zero_particle_predicts_class_zero():
    dataset = _separable_dataset()

    assert 0.5 == LinearProbeUtility(dataset)(np.zeros(dataset.particle_dim))


def test_linear_classifier_flipped_separator_is_always_wrong():
    dataset = _separable_dataset()

    assert 0.0 == LinearProbeUtility(dataset)(-_separator(dataset))


def test_linear_classifier_rejects_dimension_at_construction():
    with pytest.raises(DimensionMismatchError):
        LinearProbeUtility(_separable_dataset(), dim=5)


def test_external_constant_output():
    utility = ExternalUtility(ExternalUtilitySpec(command="test -f {checkpoint} && echo 0.75"))

    assert 0.75 == utility(np.array([1.0, 2.0]))
    assert 0.75 == utility(np.array([-3.0]))


def test_external_reads_checkpoint_first_coordinate():
    command = f"{shlex.quote(sys.executable)} -c {shlex.quote(FIRST_COORDINATE)} {{checkpoint}}"
    utility = ExternalUtility(ExternalUtilitySpec(command=command))

    value = utility(np.array([0.1, 7.0]))

    assert struct.unpack("<f", struct.pack("<f", 0.1))[0] == value


def test_external_failure_carries_stderr():
    utility = ExternalUtility(ExternalUtilitySpec(command="echo boom >&2; test -f {checkpoint} && exit 1"))

    with pytest.raises(EvaluationFailedException) as e:
        utility(np.zeros(1))

    assert "boom" in str(e.value)
    assert "status 1" in str(e.value)


def test_external_unparseable_output():
    utility = ExternalUtility(ExternalUtilitySpec(command="test -f {checkpoint} && echo accuracy"))

    with pytest.raises(EvaluationFailedException):
        utility(np.zeros(1))


def test_external_timeout():
    utility = ExternalUtility(ExternalUtilitySpec(command="sleep 5; echo {checkpoint}", timeout=0.2))

    with pytest.raises(EvaluationFailedException) as e:
        utility(np.zeros(1))

    assert "timed out" in str(e.value)


@pytest.mark.parametrize("name", ["sphere", "rastrigin", "rosenbrock"])
def test_landscapes_never_exceed_their_optimum(name):
    utility = LandscapeUtility(name)
    rng = np.random.default_rng(11)

    assert all(utility(rng.uniform(-10, 10, size=rng.integers(2, 12))) <= 0.0 for _ in range(200))


def test_harmonic_mean_lies_between_min_and_mean():
    rng = np.random.default_rng(3)

    for _ in range(200):
        scores = rng.uniform(0.01, 1.0, size=rng.integers(2, 6))
        value = harmonic_mean_utility(scores)

        assert scores.min() - 1e-12 <= value <= scores.mean() + 1e-12
        assert value < scores.mean()


def test_harmonic_mean_of_equal_scores_is_that_score():
    assert 0.7 == pytest.approx(harmonic_mean_utility([0.7, 0.7, 0.7]), abs=1e-12)


def test_linear_classifier_accuracy_is_scale_free():
    dataset = synthetic_classification(n_per_class=30, n_features=3, n_classes=3, separation=1.5, seed=2)
    utility = linear_probe_utility(dataset)
    rng = np.random.default_rng(6)

    for _ in range(50):
        x = rng.normal(size=dataset.particle_dim)
        accuracy = utility(x)

        assert 0.0 <= accuracy <= 1.0
        assert accuracy == utility(2.0 * x) == utility(0.25 * x)
