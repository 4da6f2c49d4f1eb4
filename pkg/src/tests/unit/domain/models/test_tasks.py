import numpy as np
import pytest

from model_swarms.application.exceptions import DimensionMismatchError, InvalidValueException
from model_swarms.domain.models.analysis import CorrectnessMatrix
from model_swarms.domain.models.composition import DistributionSet, mixture_targets, synthetic_distributions
from model_swarms.domain.models.tasks import ExternalUtilitySpec, TaskScores, synthetic_classification


@pytest.mark.parametrize("command", ["echo 1", "cat {checkpoint} {checkpoint}"])
def test_external_command_needs_one_placeholder(command):
    with pytest.raises(InvalidValueException):
        ExternalUtilitySpec(command=command)


def test_external_timeout_must_be_positive():
    with pytest.raises(InvalidValueException):
        ExternalUtilitySpec(command="test -f {checkpoint}", timeout=0)


def test_task_scores_reject_negative():
    with pytest.raises(InvalidValueException):
        TaskScores([0.5, -0.1])


def test_synthetic_classification_is_balanced():
    dataset = synthetic_classification(n_per_class=20, n_features=3, n_classes=2)

    assert (40, 3) == dataset.features.shape
    assert [20, 20] == np.bincount(dataset.labels).tolist()
    assert 8 == dataset.particle_dim


def test_distribution_rows_must_sum_to_one():
    with pytest.raises(InvalidValueException):
        DistributionSet([[0.5, 0.4]])


def test_synthetic_distributions_are_valid():
    contexts = synthetic_distributions(n_experts=4, vocab=6, n_contexts=3, seed=1)

    assert 3 == len(contexts)
    assert all((4, 6) == context.matrix.shape for context in contexts)


def test_mixture_targets_follow_given_weights():
    contexts = [DistributionSet([[1.0, 0.0], [0.0, 1.0]]), DistributionSet([[0.5, 0.5], [0.0, 1.0]])]

    weights, targets = mixture_targets(contexts, weights=[0.25, 0.75])

    assert [0.25, 0.75] == weights.tolist()
    assert [0.25, 0.75] == targets[0].tolist()
    assert [0.125, 0.875] == targets[1].tolist()


def test_mixture_targets_draw_weights_on_the_simplex():
    contexts = synthetic_distributions(n_experts=3, vocab=4, n_contexts=2, seed=0)

    weights, targets = mixture_targets(contexts, seed=5)

    assert 1.0 == pytest.approx(weights.sum())
    assert 2 == len(targets)
    assert all(1.0 == pytest.approx(target.sum()) for target in targets)


def test_mixture_targets_reject_wrong_weight_count():
    contexts = synthetic_distributions(n_experts=3, vocab=4, n_contexts=1)

    with pytest.raises(DimensionMismatchError):
        mixture_targets(contexts, weights=[0.5, 0.5])


@pytest.mark.parametrize("entries", [[[0, 2]], [[]], [0, 1]])
def test_correctness_matrix_rejects_malformed_entries(entries):
    with pytest.raises(InvalidValueException):
        CorrectnessMatrix(entries)


def test_external_spec_defaults():
    spec = ExternalUtilitySpec(command="score {checkpoint}")

    assert spec.workdir is None
    assert 600.0 == spec.timeout
