"""3D Gauss-Markov mobility inside the arena; the GBS is static.

Velocity components are magnitude-clamped to the per-axis box and the
per-UAV reference (mean) velocity carries a sign that flips on boundary
reflection, so UAVs keep moving instead of pinning to a wall.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SimConfig


@dataclass
class UavKinematics:
    position: np.ndarray       # meters, shape (3,)
    velocity: np.ndarray       # m/s, shape (3,)
    mean_velocity: np.ndarray  # signed per-UAV reference velocity


def distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


def gauss_markov_velocity(
    v: np.ndarray,
    mean_v: np.ndarray,
    memory: float,
    noise_std: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """One raw (pre-clamp) Gauss-Markov velocity update."""
    noise = rng.standard_normal(3) * noise_std
    return memory * v + (1.0 - memory) * mean_v + np.sqrt(1.0 - memory**2) * noise


def clamp_velocity(v: np.ndarray, v_min: np.ndarray, v_max: np.ndarray) -> np.ndarray:
    """Clamp each component's magnitude into [v_min, v_max], keeping sign."""
    sign = np.where(v >= 0.0, 1.0, -1.0)
    return sign * np.clip(np.abs(v), v_min, v_max)


def init_positions(cfg: SimConfig, rng: np.random.Generator) -> list[UavKinematics]:
    """Uniform positions above the altitude floor; mean velocity with a
    random sign per horizontal component."""
    if cfg.min_uav_altitude >= cfg.arena_z:
        raise ValueError("infeasible altitude band")
    states = []
    mean_v = np.asarray(cfg.mean_velocity, dtype=float)
    for _ in range(cfg.num_uavs):
        pos = np.array(
            [
                rng.uniform(0.0, cfg.arena_x),
                rng.uniform(0.0, cfg.arena_y),
                rng.uniform(cfg.min_uav_altitude, cfg.arena_z),
            ]
        )
        signs = np.array(
            [
                1.0 if rng.random() < 0.5 else -1.0,
                1.0 if rng.random() < 0.5 else -1.0,
                1.0 if rng.random() < 0.5 else -1.0,
            ]
        )
        mv = mean_v * signs
        states.append(UavKinematics(position=pos, velocity=mv.copy(), mean_velocity=mv))
    return states


def step(kin: UavKinematics, cfg: SimConfig, rng: np.random.Generator) -> UavKinematics:
    """Advance one slot: GM velocity update, clamp, move, reflect."""
    v = gauss_markov_velocity(
        kin.velocity,
        kin.mean_velocity,
        cfg.gm_memory,
        np.asarray(cfg.gm_noise_std, dtype=float),
        rng,
    )
    v = clamp_velocity(v, np.asarray(cfg.v_min, dtype=float), np.asarray(cfg.v_max, dtype=float))
    pos = kin.position + v * cfg.slot_len
    mean_v = kin.mean_velocity.copy()

    lo = np.array([0.0, 0.0, cfg.min_uav_altitude])
    hi = cfg.arena
    for axis in range(3):
        # one reflection per slot is enough for slot-scale displacements
        if pos[axis] < lo[axis]:
            pos[axis] = 2.0 * lo[axis] - pos[axis]
            v[axis] = -v[axis]
            mean_v[axis] = -mean_v[axis]
        elif pos[axis] > hi[axis]:
            pos[axis] = 2.0 * hi[axis] - pos[axis]
            v[axis] = -v[axis]
            mean_v[axis] = -mean_v[axis]
        pos[axis] = min(max(pos[axis], lo[axis]), hi[axis])
    return UavKinematics(position=pos, velocity=v, mean_velocity=mean_v)
