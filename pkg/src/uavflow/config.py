"""Simulation configuration, defaults, and named random-number streams.

The config file format is flat ``key = value`` text, one pair per line,
with ``#`` comments.  Every key omitted from the file falls back to the
default below.  Units follow the field docs: meters, seconds, bits, Hz,
dB/dBm where noted.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace

import numpy as np

CONFIG_ENV_VAR = "UAVFLOW_CONFIG"

# Order is the spawn order; do not reorder (it would change every seeded run).
STREAM_NAMES = ("mobility", "traffic", "channel", "policy", "tiebreak")


@dataclass(frozen=True)
class SimConfig:
    # Arena / geometry (meters)
    arena_x: float = 1200.0
    arena_y: float = 1200.0
    arena_z: float = 200.0
    min_uav_altitude: float = 100.0
    gbs_x: float = 0.0
    gbs_y: float = 600.0
    gbs_z: float = 0.0

    # Time discretization
    num_uavs: int = 35
    slot_len: float = 0.05            # seconds
    horizon: float = 9.0              # seconds; num_slots = horizon / slot_len

    # Traffic
    traffic_prob: float = 0.03        # per UAV per slot
    packet_bits: int = 12000          # 1500 bytes
    traffic_mb_min: float = 0.5
    traffic_mb_max: float = 2.0
    deadline_min: float = 1.5         # seconds, at traffic_mb_min
    deadline_max: float = 3.0         # seconds, at traffic_mb_max
    buffer_min: int = 3000            # packets
    buffer_max: int = 5000

    # Radio
    max_neighbors: int = 8            # N
    tx_power_dbm: float = 30.0        # p_max
    noise_psd_dbm: float = -174.0     # dBm/Hz
    num_subchannels: int = 25         # B
    subchannel_bw: float = 20e6       # Hz
    ref_gain_db: float = -50.0        # beta_0 at 1 m
    s_curve_d1: float = 9.61
    s_curve_d2: float = 0.15
    pathloss_exp: float = 2.0
    excess_loss_los_db: float = 1.0
    excess_loss_nlos_db: float = 20.0
    carrier_freq: float = 2.4e9       # Hz
    light_speed: float = 3e8          # m/s
    sinr_min_db: float = 11.0
    loss_cap: float = 1.0             # reported threshold on the loss ratio

    # Mobility (Gauss-Markov; memory/noise are our choices, see README)
    mean_velocity: tuple = (25.0, 25.0, 10.0)
    v_min: tuple = (15.0, 15.0, 5.0)
    v_max: tuple = (50.0, 50.0, 20.0)
    gm_memory: float = 0.85
    gm_noise_std: tuple = (5.0, 5.0, 2.0)

    # Queueing policy switches
    purge_expired: bool = False

    # Reward shaping
    reward_w_min: float = 0.2
    reward_w_max: float = 0.8
    reward_q_min: int = 1
    reward_q_max: int = 1000
    path_penalties: tuple = (0.5, 0.3, 0.05)   # per priority 1..3
    tol_zero_penalty: float = 0.1
    tol_k1: float = 3.5
    tol_k2: float = -0.35
    tol_q_scale: float = 300.0
    tol_sign: int = 1                 # -1 negates the tanh argument

    # Dirichlet policy head
    conc_scale: float = 30.0          # rho
    conc_floor: float = 0.5           # alpha_min
    mask_eps: float = 1e-8
    q_step: int = 300                 # packets per extra forwarding node

    # Baseline switches
    greedy_progress_gate: bool = False

    @property
    def num_slots(self) -> int:
        return int(round(self.horizon / self.slot_len))

    @property
    def arena(self) -> np.ndarray:
        return np.array([self.arena_x, self.arena_y, self.arena_z])

    @property
    def gbs_position(self) -> np.ndarray:
        return np.array([self.gbs_x, self.gbs_y, self.gbs_z])

    @property
    def arena_diagonal(self) -> float:
        return float(np.linalg.norm(self.arena))

    @property
    def tx_power_watts(self) -> float:
        """Per-link transmit power p_max/(N+1) in watts."""
        p_max = 10 ** ((self.tx_power_dbm - 30.0) / 10.0)
        return p_max / (self.max_neighbors + 1)

    @property
    def noise_watts(self) -> float:
        """Receiver noise power b*N0 in watts."""
        n0 = 10 ** ((self.noise_psd_dbm - 30.0) / 10.0)
        return self.subchannel_bw * n0

    @property
    def ref_gain_linear(self) -> float:
        return 10 ** (self.ref_gain_db / 10.0)

    @property
    def sinr_min_linear(self) -> float:
        return 10 ** (self.sinr_min_db / 10.0)

    @property
    def deadline_slope(self) -> float:
        """Seconds of deadline per MB above traffic_mb_min."""
        return (self.deadline_max - self.deadline_min) / (
            self.traffic_mb_max - self.traffic_mb_min
        )

    def deadline_for_size(self, size_mb: float, gen_time: float) -> float:
        """Absolute deadline in seconds (linear in traffic size)."""
        rel = self.deadline_min + (size_mb - self.traffic_mb_min) * self.deadline_slope
        return gen_time + rel

    def validate(self) -> "SimConfig":
        if self.slot_len <= 0:
            raise ConfigError("slot_len must be positive")
        if self.horizon <= 0:
            raise ConfigError("horizon must be positive")
        n = self.horizon / self.slot_len
        if abs(n - round(n)) > 1e-9:
            raise ConfigError("horizon must be an integer multiple of slot_len")
        if self.num_uavs < 1:
            raise ConfigError("num_uavs must be positive")
        if self.max_neighbors < 1:
            raise ConfigError("max_neighbors must be positive")
        if self.num_subchannels < 1:
            raise ConfigError("num_subchannels must be positive")
        if self.packet_bits < 1:
            raise ConfigError("packet_bits must be positive")
        if not 0.0 <= self.traffic_prob <= 1.0:
            raise ConfigError("traffic_prob must lie in [0, 1]")
        if not self.traffic_mb_min < self.traffic_mb_max:
            raise ConfigError("traffic size range is degenerate")
        if not self.deadline_min < self.deadline_max:
            raise ConfigError("deadline range is degenerate")
        if not 0 < self.buffer_min <= self.buffer_max:
            raise ConfigError("buffer range is degenerate")
        if self.min_uav_altitude >= self.arena_z:
            raise ConfigError("infeasible altitude band")
        if not 0.0 <= self.gm_memory <= 1.0:
            raise ConfigError("gm_memory must lie in [0, 1]")
        if self.conc_scale <= 0 or self.conc_floor <= 0 or self.mask_eps <= 0:
            raise ConfigError("concentration parameters must be positive")
        if self.q_step < 1:
            raise ConfigError("q_step must be positive")
        return self


class ConfigError(ValueError):
    pass


def desk_scale(**overrides) -> SimConfig:
    """Small preset used by CI and the acceptance suite."""
    base = dict(num_uavs=8, horizon=3.0, max_neighbors=4)
    base.update(overrides)
    return replace(SimConfig(), **base).validate()


def paper_scale(**overrides) -> SimConfig:
    """Full Table-scale preset (long-running; not a CI gate)."""
    return replace(SimConfig(), **overrides).validate()


_TUPLE_FIELDS = {"mean_velocity", "v_min", "v_max", "gm_noise_std", "path_penalties"}


def _parse_value(name: str, raw: str, default):
    raw = raw.strip()
    if name in _TUPLE_FIELDS:
        parts = [p for p in raw.replace(",", " ").split() if p]
        return tuple(float(p) for p in parts)
    if isinstance(default, bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean value for {name}: {raw!r}")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def load_config(path: str | None = None) -> SimConfig:
    """Load a flat key/value config file; omitted keys keep their defaults.

    With ``path=None`` the UAVFLOW_CONFIG environment variable is consulted;
    if that is unset too, the all-defaults config is returned.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
        if path is None:
            return SimConfig().validate()
    defaults = {f.name: getattr(SimConfig(), f.name) for f in fields(SimConfig)}
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = line.split("=", 1)
            key = key.strip()
            if key not in defaults:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _parse_value(key, raw, defaults[key])
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}")
    return replace(SimConfig(), **values).validate()


def save_config(cfg: SimConfig, path: str) -> None:
    with open(path, "w") as fh:
        for f in fields(SimConfig):
            val = getattr(cfg, f.name)
            if isinstance(val, tuple):
                val = " ".join(repr(v) for v in val)
            fh.write(f"{f.name} = {val}\n")


@dataclass
class RngStreams:
    """Named, independent random streams derived from one master seed.

    Separate streams mean a policy change never perturbs the mobility or
    traffic draws of a seeded run.
    """

    master_seed: int
    mobility: np.random.Generator = field(init=False)
    traffic: np.random.Generator = field(init=False)
    channel: np.random.Generator = field(init=False)
    policy: np.random.Generator = field(init=False)
    tiebreak: np.random.Generator = field(init=False)

    def __post_init__(self):
        children = np.random.SeedSequence(self.master_seed).spawn(len(STREAM_NAMES))
        for name, seq in zip(STREAM_NAMES, children):
            setattr(self, name, np.random.default_rng(seq))


def episode_seed(master_seed: int, episode: int) -> int:
    """Stable per-episode seed derivation for training runs."""
    return int(np.random.SeedSequence([master_seed, episode]).generate_state(1)[0])
