"""Gauss-Markov mobility: statistics of the raw update, clamping, and
arena containment."""

import numpy as np

from uavflow import mobility
from uavflow.config import SimConfig, desk_scale


def test_distance():
    assert mobility.distance((0, 0, 100), (1200, 1200, 0)) == 1700.0
    assert mobility.distance((1, 2, 3), (1, 2, 3)) == 0.0


def test_gm_update_statistics():
    # With memory zeta, the raw update is Gaussian with mean
    # zeta*v + (1-zeta)*v_mean and std sqrt(1-zeta^2)*sigma per axis.
    rng = np.random.default_rng(0)
    v = np.array([10.0, -5.0, 2.0])
    mean_v = np.array([25.0, 25.0, 10.0])
    zeta, sigma = 0.85, np.array([5.0, 5.0, 2.0])
    draws = np.array(
        [mobility.gauss_markov_velocity(v, mean_v, zeta, sigma, rng) for _ in range(20000)]
    )
    expect_mean = zeta * v + (1 - zeta) * mean_v
    expect_std = np.sqrt(1 - zeta**2) * sigma
    se = expect_std / np.sqrt(draws.shape[0])
    assert np.all(np.abs(draws.mean(axis=0) - expect_mean) < 4 * se)
    assert np.allclose(draws.std(axis=0), expect_std, rtol=0.05)


def test_gm_memory_one_is_deterministic():
    rng = np.random.default_rng(1)
    v = np.array([1.0, 2.0, 3.0])
    out = mobility.gauss_markov_velocity(v, np.zeros(3), 1.0, np.ones(3), rng)
    assert np.allclose(out, v)


def test_clamp_velocity_keeps_sign():
    v_min = np.array([15.0, 15.0, 5.0])
    v_max = np.array([50.0, 50.0, 20.0])
    v = np.array([-3.0, 70.0, -10.0])
    out = mobility.clamp_velocity(v, v_min, v_max)
    assert np.allclose(out, [-15.0, 50.0, -10.0])


def test_init_positions_in_arena():
    cfg = SimConfig()
    rng = np.random.default_rng(2)
    states = mobility.init_positions(cfg, rng)
    assert len(states) == cfg.num_uavs
    for k in states:
        assert 0.0 <= k.position[0] <= cfg.arena_x
        assert 0.0 <= k.position[1] <= cfg.arena_y
        assert cfg.min_uav_altitude <= k.position[2] <= cfg.arena_z
        assert np.allclose(np.abs(k.mean_velocity), cfg.mean_velocity)


def test_step_keeps_uavs_contained():
    cfg = desk_scale()
    rng = np.random.default_rng(3)
    states = mobility.init_positions(cfg, rng)
    for _ in range(500):
        states = [mobility.step(k, cfg, rng) for k in states]
        for k in states:
            assert 0.0 <= k.position[0] <= cfg.arena_x
            assert 0.0 <= k.position[1] <= cfg.arena_y
            assert cfg.min_uav_altitude <= k.position[2] <= cfg.arena_z
            speed = np.abs(k.velocity)
            assert np.all(speed >= np.asarray(cfg.v_min) - 1e-9)
            assert np.all(speed <= np.asarray(cfg.v_max) + 1e-9)


def test_reflection_flips_mean_velocity():
    cfg = SimConfig(gm_memory=1.0, gm_noise_std=(0.0, 0.0, 0.0))
    kin = mobility.UavKinematics(
        position=np.array([0.5, 600.0, 150.0]),
        velocity=np.array([-20.0, 15.0, 5.0]),
        mean_velocity=np.array([-25.0, 25.0, 10.0]),
    )
    rng = np.random.default_rng(4)
    out = mobility.step(kin, cfg, rng)
    # wanted to cross x=0: reflected position, flipped x velocity and mean
    assert out.position[0] == 0.5  # 0.5 - 1.0 -> reflect to 0.5
    assert out.velocity[0] == 20.0
    assert out.mean_velocity[0] == 25.0
    assert out.mean_velocity[1] == 25.0  # untouched axes keep sign


def test_step_is_seed_deterministic():
    cfg = desk_scale()
    out = []
    for _ in range(2):
        rng = np.random.default_rng(5)
        states = mobility.init_positions(cfg, rng)
        for _ in range(20):
            states = [mobility.step(k, cfg, rng) for k in states]
        out.append(np.array([k.position for k in states]))
    assert np.array_equal(out[0], out[1])
