"""Per-slot radio state: gains, SINR, rates, packet capacities, and
neighbor/candidate sets.

dB-to-linear conversions happen once in the config properties; every
comparison here is in the linear domain.  Link capacity is floored to
whole packets (fractional capacity cannot deliver a partial packet).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .config import SimConfig


def uav_uav_gain(d: float, cfg: SimConfig) -> float:
    """Free-space inverse-square gain from the 1 m reference gain."""
    if d <= 0.0:
        raise ValueError("coincident nodes: distance must be positive")
    return cfg.ref_gain_linear / (d * d)


def los_probability(theta_deg: float, cfg: SimConfig) -> float:
    """Elevation-angle S-curve probability of a line-of-sight GBS link."""
    return 1.0 / (
        1.0 + cfg.s_curve_d1 * np.exp(-cfg.s_curve_d2 * (theta_deg - cfg.s_curve_d1))
    )


def uav_gbs_gain(d: float, theta_deg: float, cfg: SimConfig) -> float:
    """Expected air-to-ground gain mixing LoS and NLoS path loss."""
    if d <= 0.0:
        raise ValueError("coincident nodes: distance must be positive")
    p_los = los_probability(theta_deg, cfg)
    fs = (4.0 * np.pi * cfg.carrier_freq * d / cfg.light_speed) ** cfg.pathloss_exp
    eta_los = 10 ** (cfg.excess_loss_los_db / 10.0)
    eta_nlos = 10 ** (cfg.excess_loss_nlos_db / 10.0)
    loss = p_los * eta_los * fs + (1.0 - p_los) * eta_nlos * fs
    return 1.0 / loss


@dataclass
class LinkTable:
    """Immutable per-slot radio snapshot.  Column M of the matrices is the
    GBS; rows are transmitters."""

    dist: np.ndarray                     # (M, M+1) meters
    gain: np.ndarray                     # (M, M+1) linear
    subchannel: np.ndarray               # (M,) int, -1 for idle UAVs
    sinr: np.ndarray                     # (M, M+1) linear, rows of idle UAVs zero
    rate: np.ndarray                     # (M, M+1) bit/s
    capacity: np.ndarray                 # (M, M+1) whole packets per slot
    reachable: list = field(default_factory=list)      # psi_m arrays
    candidates: list = field(default_factory=list)     # psi_m^com, ascending ids
    inbound: list = field(default_factory=list)        # psi_m^in
    gbs_reachable: np.ndarray = None

    @property
    def num_uavs(self) -> int:
        return self.gain.shape[0]

    def d_gbs(self, m: int) -> float:
        return float(self.dist[m, self.num_uavs])


def assign_subchannels(
    active: np.ndarray, num_subchannels: int, rng: np.random.Generator
) -> np.ndarray:
    """Each active transmitter draws one subchannel uniformly.

    Draws happen in ascending UAV id order so seeded runs reproduce.
    """
    sub = np.full(active.shape[0], -1, dtype=np.int64)
    for m in np.flatnonzero(active):
        sub[m] = rng.integers(0, num_subchannels)
    return sub


def build_link_table(
    positions: np.ndarray,
    active: np.ndarray,
    cfg: SimConfig,
    rng: np.random.Generator,
) -> LinkTable:
    """Assemble the full per-slot link table for the given transmitter set."""
    m = positions.shape[0]
    eta_los = 10 ** (cfg.excess_loss_los_db / 10.0)
    eta_nlos = 10 ** (cfg.excess_loss_nlos_db / 10.0)
    dist, gain = kernels.pair_gains(
        positions,
        cfg.gbs_position,
        cfg.ref_gain_linear,
        cfg.s_curve_d1,
        cfg.s_curve_d2,
        eta_los,
        eta_nlos,
        cfg.pathloss_exp,
        cfg.carrier_freq,
        cfg.light_speed,
    )
    active = np.asarray(active, dtype=bool)
    sub = assign_subchannels(active, cfg.num_subchannels, rng)
    sinr = kernels.sinr_table(
        gain, sub, active.astype(np.uint8), cfg.tx_power_watts, cfg.noise_watts,
        cfg.num_subchannels,
    )
    rate = cfg.subchannel_bw * np.log2(1.0 + sinr)
    capacity = np.floor(rate * cfg.slot_len / cfg.packet_bits).astype(np.int64)

    table = LinkTable(
        dist=dist,
        gain=gain,
        subchannel=sub,
        sinr=sinr,
        rate=rate,
        capacity=capacity,
        gbs_reachable=np.zeros(m, dtype=bool),
    )
    build_neighbor_sets(table, active, cfg, rng)
    return table


def build_neighbor_sets(
    table: LinkTable, active: np.ndarray, cfg: SimConfig, rng: np.random.Generator
) -> LinkTable:
    """Reachable sets from the SINR gate, seeded candidate subsampling up
    to N, inbound sets by duality, and GBS reachability."""
    m = table.num_uavs
    thr = cfg.sinr_min_linear
    table.reachable = []
    table.candidates = []
    table.inbound = [[] for _ in range(m)]
    for i in range(m):
        if not active[i]:
            table.reachable.append(np.empty(0, dtype=np.int64))
            table.candidates.append([])
            continue
        reach = np.flatnonzero(table.sinr[i, :m] >= thr)
        reach = reach[reach != i]
        table.reachable.append(reach)
        if reach.size > cfg.max_neighbors:
            chosen = rng.choice(reach, size=cfg.max_neighbors, replace=False)
        else:
            chosen = reach
        cand = sorted(int(c) for c in chosen)
        table.candidates.append(cand)
        for c in cand:
            table.inbound[c].append(i)
        table.gbs_reachable[i] = table.sinr[i, m] >= thr
    return table
