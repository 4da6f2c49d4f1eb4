import logging

import attrs
import numpy as np
import pytest

from model_swarms.application.exceptions import (
    ConfigurationNotValid,
    DimensionMismatchError,
    InvalidValueException,
    ZeroNormalizerException,
)
from model_swarms.domain.models.swarm import Particle, RandomDraw
from model_swarms.domain.models.swarm_config import SwarmConfig
from model_swarms.domain.swarm_core import (
    draw_randoms,
    init_velocity,
    interpolate,
    populate,
    step_contribution,
    update_location,
    update_velocity,
)
from tests.doubles.stub import scripted_rng

HAND_CONFIG = SwarmConfig(phi_v=0.2, phi_p=0.3, phi_g=0.4, phi_w=0.1)


def _vec(*values):
    return np.array(values, dtype=np.float64)


@pytest.mark.parametrize(
    "a, b, t, expected",
    [
        ([1, 2], [3, 4], 1.0, [1, 2]),
        ([1, 2], [3, 4], 0.5, [2, 3]),
        ([0, 10], [10, 0], 0.3, [7, 3]),
    ],
)
def test_interpolate(a, b, t, expected):
    assert np.allclose(expected, interpolate(_vec(*a), _vec(*b), t), atol=1e-12)


@pytest.mark.parametrize("t", [-0.1, 1.1])
def test_interpolate_rejects_weight_outside_unit_interval(t):
    with pytest.raises(InvalidValueException):
        interpolate(_vec(0), _vec(1), t)


def test_interpolate_rejects_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        interpolate(_vec(0, 1), _vec(1), 0.5)


def test_populate_without_extra_slots_returns_experts():
    population = populate([_vec(0), _vec(2)], 2, scripted_rng())

    assert [[0.0], [2.0]] == [x.tolist() for x in population]


def test_populate_interpolates_drawn_pair():
    population = populate([_vec(0), _vec(2)], 3, scripted_rng(choice=(0, 1), random=0.25))

    # 0.25*0 + 0.75*2
    assert [[0.0], [2.0], [1.5]] == [x.tolist() for x in population]


def test_populate_single_expert_duplicates_with_warning(caplog):
    with caplog.at_level(logging.WARNING, logger="model-swarms"):
        population = populate([_vec(1, 1)], 3, np.random.default_rng(0))

    assert [[1.0, 1.0]] * 3 == [x.tolist() for x in population]
    assert "degenerates to duplication" in caplog.text


def test_populate_without_crossover_copies_experts():
    experts = [_vec(0, 0), _vec(5, 5), _vec(9, 9)]
    population = populate(experts, 20, np.random.default_rng(3), disable_crossover=True)

    assert all(any(np.array_equal(x, expert) for expert in experts) for x in population)


def test_populated_children_lie_on_parent_segments():
    experts = [_vec(0.0, 0.0), _vec(4.0, 2.0)]
    population = populate(experts, 12, np.random.default_rng(7))

    for child in population:
        assert np.isclose(child[1], child[0] / 2, atol=1e-12)
        assert 0.0 <= child[0] <= 4.0


@pytest.mark.parametrize("j, expected", [(1, [3.0]), (0, [0.0])])
def test_init_velocity_points_at_drawn_particle(j, expected):
    assert expected == init_velocity(0, [_vec(1), _vec(4)], scripted_rng(integers=j)).tolist()


def test_zero_init_velocity():
    velocity = init_velocity(0, [_vec(1, 2), _vec(4, 5)], np.random.default_rng(0), zero_init_velocity=True)

    assert [0.0, 0.0] == velocity.tolist()


def test_update_velocity_hand_evaluation():
    particle = Particle(id=0, x=_vec(0), v=_vec(1), p=_vec(2))
    velocity = update_velocity(particle, _vec(3), _vec(-1), HAND_CONFIG, RandomDraw.ones())

    assert np.isclose(2.1, velocity[0], atol=1e-12)


def test_update_velocity_with_coinciding_attractors_is_damped_inertia():
    x = _vec(0.5, -1.0)
    particle = Particle(id=0, x=x, v=_vec(2.0, 1.0), p=x.copy())
    draw = RandomDraw(0.3, 0.6, 0.9, 0.2)
    cfg = SwarmConfig()
    C = 0.3 * cfg.phi_v + 0.6 * cfg.phi_p + 0.9 * cfg.phi_g + 0.2 * cfg.phi_w

    velocity = update_velocity(particle, x.copy(), x.copy(), cfg, draw)

    assert np.allclose((0.3 * cfg.phi_v / C) * particle.v, velocity, atol=1e-12)


def test_update_velocity_pulls_towards_global_best():
    x, g = _vec(1.0), _vec(3.0)
    particle = Particle(id=0, x=x, v=_vec(0.0), p=g.copy())

    velocity = update_velocity(particle, g, x.copy(), HAND_CONFIG, RandomDraw.ones())

    assert np.isclose((0.3 + 0.4) / 1.0 * 2.0, velocity[0], atol=1e-12)


def test_zero_normalizer_is_rejected():
    particle = Particle(id=0, x=_vec(0), v=_vec(1), p=_vec(2))
    cfg = SwarmConfig(phi_v=0, phi_p=0, phi_g=0, phi_w=0)

    with pytest.raises(ZeroNormalizerException):
        update_velocity(particle, _vec(3), _vec(-1), cfg, RandomDraw.ones())


@pytest.mark.parametrize(
    "x, v, lambda_, expected",
    [
        ([0], [2.1], 0.5, [1.05]),
        ([1, 1], [0, 0], 0.7, [1, 1]),
        ([1, 1], [-1, 2], 1.0, [0, 3]),
    ],
)
def test_update_location(x, v, lambda_, expected):
    assert np.allclose(expected, update_location(_vec(*x), _vec(*v), lambda_), atol=1e-12)


def test_update_location_rejects_overflow():
    with pytest.raises(InvalidValueException) as e:
        update_location(_vec(0, 1e308), _vec(0, 1e308), 10.0)

    assert "coordinate 1" in str(e.value)


def test_deterministic_randoms_are_ones():
    draw = draw_randoms(SwarmConfig(deterministic_randoms=True), np.random.default_rng(0))

    assert RandomDraw.ones() == draw


def test_step_contribution_rebuilds_location():
    rng = np.random.default_rng(11)
    cfg = SwarmConfig()

    for dim in (1, 8):
        x, v, p, g, g_w = (rng.normal(size=dim) for _ in range(5))
        draw = draw_randoms(cfg, rng)
        lambda_ = float(rng.uniform(0.1, 1.0))

        moved = update_location(x, update_velocity(Particle(id=0, x=x, v=v, p=p), g, g_w, cfg, draw), lambda_)
        contribution = step_contribution(cfg, draw, lambda_, 0, 1)

        assert np.allclose(moved, contribution.apply(v, p, x, g, g_w), atol=1e-12)


def _random_particle(rng, dim):
    x = rng.uniform(-5, 5, dim)
    return Particle(id=0, x=x, v=rng.normal(size=dim), p=rng.uniform(-5, 5, dim))


def test_update_velocity_is_linear_in_the_differences():
    rng = np.random.default_rng(21)
    cfg = SwarmConfig()

    for _ in range(50):
        particle = _random_particle(rng, 4)
        g, g_w = rng.uniform(-5, 5, 4), rng.uniform(-5, 5, 4)
        draw = draw_randoms(cfg, rng)
        x = particle.x
        doubled = Particle(id=0, x=x, v=2 * particle.v, p=x + 2 * (particle.p - x))

        velocity = update_velocity(particle, g, g_w, cfg, draw)
        velocity_doubled = update_velocity(doubled, x + 2 * (g - x), x + 2 * (g_w - x), cfg, draw)

        assert np.allclose(2 * velocity, velocity_doubled, rtol=1e-12, atol=1e-12)


def test_velocity_without_repel_stays_inside_the_attractor_box():
    rng = np.random.default_rng(22)
    cfg = SwarmConfig(phi_w=0.0)

    for _ in range(200):
        particle = _random_particle(rng, 6)
        g = rng.uniform(-5, 5, 6)
        draw = draw_randoms(cfg, rng)
        x = particle.x
        bound = max(np.abs(particle.v).max(), np.abs(particle.p - x).max(), np.abs(g - x).max())

        velocity = update_velocity(particle, g, rng.uniform(-5, 5, 6), cfg, draw)

        assert np.abs(velocity).max() <= bound + 1e-12


def test_interpolate_is_symmetric():
    rng = np.random.default_rng(23)

    for _ in range(100):
        a, b, t = rng.normal(size=5), rng.normal(size=5), rng.random()

        assert np.allclose(interpolate(a, b, t), interpolate(b, a, 1 - t), atol=1e-12)


def test_location_steps_add_up():
    rng = np.random.default_rng(24)

    for _ in range(100):
        x, v = rng.uniform(-5, 5, 3), rng.normal(size=3)
        first, second = rng.uniform(0.1, 1.0, 2)

        stepped = update_location(update_location(x, v, first), v, second)

        assert np.allclose(update_location(x, v, first + second), stepped, atol=1e-12)


def test_populate_is_reproducible_for_a_seed():
    experts = [_vec(0, 1), _vec(2, 3), _vec(-4, 5)]

    first = populate(experts, 15, np.random.default_rng(31))
    second = populate(experts, 15, np.random.default_rng(31))

    assert all(np.array_equal(a, b) for a, b in zip(first, second))


def test_widened_walk_draws_can_reverse():
    cfg = SwarmConfig(walk_low=-0.2)
    rng = np.random.default_rng(25)

    values = np.array([list(attrs.astuple(draw_randoms(cfg, rng))[:4]) for _ in range(500)])

    assert values.min() >= -0.2
    assert values.max() <= 1.0
    assert (values < 0).any()


def test_default_walk_draws_stay_nonnegative():
    rng = np.random.default_rng(25)

    values = np.array([list(attrs.astuple(draw_randoms(SwarmConfig(), rng))[:4]) for _ in range(500)])

    assert (values >= 0).all()


@pytest.mark.parametrize("walk_low", [0.1, -1.5])
def test_walk_low_outside_range_is_rejected(walk_low):
    with pytest.raises(ConfigurationNotValid):
        SwarmConfig(walk_low=walk_low)
