"""Configuration defaults, derived quantities, file round-trip, and RNG streams."""

import math

import numpy as np
import pytest

from uavflow.config import (
    ConfigError,
    RngStreams,
    SimConfig,
    desk_scale,
    episode_seed,
    load_config,
    paper_scale,
    save_config,
)


def test_default_slot_count():
    cfg = SimConfig()
    assert cfg.num_slots == 180          # 9 s / 0.05 s
    assert desk_scale().num_slots == 60  # 3 s / 0.05 s


def test_arena_diagonal():
    cfg = SimConfig()
    assert cfg.arena_diagonal == pytest.approx(
        math.sqrt(1200.0**2 + 1200.0**2 + 200.0**2), abs=1e-12
    )


def test_tx_power_split():
    # p_max = 30 dBm = 1 W, split across N+1 links
    cfg = SimConfig()
    assert cfg.tx_power_watts == pytest.approx(1.0 / 9.0, rel=1e-12)
    assert desk_scale().tx_power_watts == pytest.approx(0.2, rel=1e-12)


def test_noise_power():
    # b * N0 = 20 MHz * 10^((-174-30)/10) W
    cfg = SimConfig()
    assert cfg.noise_watts == pytest.approx(7.962143411069971e-14, rel=1e-12)


def test_linear_conversions():
    cfg = SimConfig()
    assert cfg.ref_gain_linear == pytest.approx(1e-5, rel=1e-12)
    assert cfg.sinr_min_linear == pytest.approx(10**1.1, rel=1e-12)


def test_deadline_linear_in_size():
    cfg = SimConfig()
    assert cfg.deadline_for_size(0.5, 0.0) == pytest.approx(1.5)
    assert cfg.deadline_for_size(2.0, 0.0) == pytest.approx(3.0)
    # midpoint size -> midpoint deadline, offset by generation time
    assert cfg.deadline_for_size(1.25, 2.0) == pytest.approx(2.0 + 2.25)


def test_validate_rejects_bad_values():
    with pytest.raises(ConfigError):
        SimConfig(slot_len=-0.05).validate()
    with pytest.raises(ConfigError):
        SimConfig(horizon=9.02).validate()          # not a slot multiple
    with pytest.raises(ConfigError):
        SimConfig(traffic_prob=1.5).validate()
    with pytest.raises(ConfigError):
        SimConfig(buffer_min=0).validate()
    with pytest.raises(ConfigError):
        SimConfig(min_uav_altitude=300.0).validate()
    with pytest.raises(ConfigError):
        desk_scale(q_step=0)


def test_presets():
    d = desk_scale()
    assert (d.num_uavs, d.horizon, d.max_neighbors) == (8, 3.0, 4)
    p = paper_scale()
    assert (p.num_uavs, p.horizon, p.max_neighbors) == (35, 9.0, 8)
    assert desk_scale(num_uavs=12).num_uavs == 12


def test_config_file_round_trip(tmp_path):
    cfg = desk_scale(traffic_prob=0.07, purge_expired=True)
    path = tmp_path / "run.cfg"
    save_config(cfg, str(path))
    loaded = load_config(str(path))
    assert loaded == cfg


def test_config_file_partial_and_comments(tmp_path):
    path = tmp_path / "partial.cfg"
    path.write_text("# comment\nnum_uavs = 5\nmean_velocity = 10 10 4\n\n")
    cfg = load_config(str(path))
    assert cfg.num_uavs == 5
    assert cfg.mean_velocity == (10.0, 10.0, 4.0)
    assert cfg.slot_len == 0.05  # untouched default


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("not_a_key = 3\n")
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(str(bad))
    bad.write_text("num_uavs otter\n")
    with pytest.raises(ConfigError, match="expected"):
        load_config(str(bad))
    bad.write_text("num_uavs = otter\n")
    with pytest.raises(ConfigError, match="bad value"):
        load_config(str(bad))


def test_config_env_var(tmp_path, monkeypatch):
    path = tmp_path / "env.cfg"
    path.write_text("num_uavs = 6\n")
    monkeypatch.setenv("UAVFLOW_CONFIG", str(path))
    assert load_config().num_uavs == 6
    monkeypatch.delenv("UAVFLOW_CONFIG")
    assert load_config() == SimConfig()


def test_rng_streams_independent_and_reproducible():
    a, b = RngStreams(7), RngStreams(7)
    assert a.mobility.random() == b.mobility.random()
    # consuming one stream must not perturb another
    c = RngStreams(7)
    c.policy.random(1000)
    d = RngStreams(7)
    assert c.traffic.random() == d.traffic.random()
    assert c.mobility.random() == d.mobility.random()
    # different seeds give different draws
    assert RngStreams(8).mobility.random() != RngStreams(7).mobility.random()


def test_episode_seed_stable_and_distinct():
    assert episode_seed(3, 0) == episode_seed(3, 0)
    seeds = {episode_seed(3, i) for i in range(100)}
    assert len(seeds) == 100
