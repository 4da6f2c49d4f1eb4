import pytest

from model_swarms.application.adapters.checkpoint import CheckpointRepository
from model_swarms.application.adapters.run_config import (
    build_experts,
    build_utility,
    load_run_config,
    parse_run_settings,
)
from model_swarms.application.adapters.utilities import ExternalUtility, LandscapeUtility, LinearProbeUtility
from model_swarms.application.exceptions import ConfigurationNotValid
from model_swarms.application.use_cases.search import DEFAULT_GRID
from tests.doubles.stub import write_run_config


def test_defaults_fill_missing_keys():
    settings = parse_run_settings({})

    assert "sphere" == settings.utility
    assert 10 == settings.swarm.n_initial
    assert 20 == settings.swarm.N
    assert DEFAULT_GRID == settings.grid
    assert settings.diversity is None


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigurationNotValid) as e:
        parse_run_settings({"phi_x": "0.1"})

    assert "phi_x" in str(e.value)


@pytest.mark.parametrize(
    "values",
    [
        {"N": "many"},
        {"utility": "ackley"},
        {"utility": "external"},
        {"zero_init_velocity": "maybe"},
        {"diversity": "2by5"},
        {"grid_phi_v": ""},
        {"d_k": "0.1", "d_n": "0.1"},
    ],
)
def test_invalid_values_are_rejected(values):
    with pytest.raises(ConfigurationNotValid):
        parse_run_settings(values)


def test_swarm_and_run_keys_are_parsed(tmp_path):
    path = write_run_config(
        tmp_path / "run.env",
        N=30,
        seed=7,
        phi_w=0.1,
        deterministic_randoms="true",
        utility="rastrigin",
        dim=4,
        random_experts=6,
        grid_lambda="0.5,1.0",
    )

    settings = load_run_config(path)

    assert (30, 7, 0.1, 6) == (settings.swarm.N, settings.swarm.seed, settings.swarm.phi_w, settings.swarm.n_initial)
    assert settings.swarm.deterministic_randoms
    assert (0.5, 1.0) == settings.grid["lambda0"]
    assert "rastrigin" == build_utility(settings).name
    assert "7" == settings.raw["seed"]


def test_diversity_sets_population_base():
    settings = parse_run_settings({"diversity": "2x5"})

    assert (2, 5) == settings.diversity
    assert 10 == settings.swarm.n_initial


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigurationNotValid):
        load_run_config(tmp_path / "absent.env")


def test_build_utility_kinds():
    assert isinstance(build_utility(parse_run_settings({"utility": "rosenbrock"})), LandscapeUtility)
    assert isinstance(build_utility(parse_run_settings({"utility": "linear_probe"})), LinearProbeUtility)

    external = build_utility(
        parse_run_settings({"utility": "external", "external_command": "echo 1 {checkpoint}", "external_timeout": "5"})
    )
    assert isinstance(external, ExternalUtility)
    assert 5.0 == external.spec.timeout


def test_random_experts_are_seeded():
    settings = parse_run_settings({"dim": "3", "random_experts": "4", "expert_low": "-1", "expert_high": "1"})

    first, second = build_experts(settings, 11), build_experts(settings, 11)

    assert 4 == len(first)
    assert all((first_x == second_x).all() for first_x, second_x in zip(first, second))
    assert all(((x >= -1) & (x <= 1)).all() and 3 == x.shape[0] for x in first)


def test_linear_classifier_experts_match_weight_dimension():
    settings = parse_run_settings({"utility": "linear_probe", "probe_features": "3", "probe_classes": "2"})

    assert all(8 == x.shape[0] for x in build_experts(settings, 0))


def test_checkpoint_experts_are_loaded(tmp_path):
    paths = []
    for index in range(2):
        path = tmp_path / f"expert-{index}.mswm"
        CheckpointRepository.save([float(index), 1.0], path)
        paths.append(str(path))

    settings = parse_run_settings({"experts": ",".join(paths)})

    assert 2 == settings.swarm.n_initial
    assert [[0.0, 1.0], [1.0, 1.0]] == [x.tolist() for x in build_experts(settings, 0)]


def test_grid_lambda_key_sets_step_length_axis():
    settings = parse_run_settings({"grid_lambda": "0.5,0.6", "grid_phi_w": "0.01"})

    assert (0.5, 0.6) == settings.grid["lambda0"]
    assert (0.01,) == settings.grid["phi_w"]


def test_grid_key_must_name_a_known_axis():
    with pytest.raises(ConfigurationNotValid):
        parse_run_settings({"grid_lambda0": "0.5"})
