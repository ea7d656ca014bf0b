"""Dec-POMDP surface: per-agent observations and rewards.

Observation layout: [d_gbs, priority, q_sel] followed by N neighbor
blocks of [id, d_gbs, feasible-capability], candidates in ascending
global-id order, zero-padded past the candidate count.  All features are
linearly normalized to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import LinkTable
from .config import SimConfig

QUEUE_NORM = 5000.0   # upper bound of the buffer-size range


@dataclass
class AgentView:
    """Slot-local view handed to a policy for one acting agent."""

    agent: int
    observation: np.ndarray
    candidates: list            # ascending global ids
    cand_distance: np.ndarray   # d_{m',k} per candidate, meters
    cand_capability: np.ndarray # c_{m,m'} = min(link capacity, receiver free buffer)
    own_distance: float         # d_{m,k}, meters
    priority: int
    q_sel: int
    gbs_reachable: bool


def feasible_capability(table: LinkTable, m: int, mprime: int, q_free: int) -> int:
    """c_{m,m'}: the binding constraint of the transfer rule."""
    return int(min(table.capacity[m, mprime], q_free))


def build_observation(view_data: AgentView, cfg: SimConfig) -> np.ndarray:
    """Assemble and normalize the fixed-length observation vector."""
    n = cfg.max_neighbors
    diag = cfg.arena_diagonal
    obs = np.zeros(3 + 3 * n)
    obs[0] = view_data.own_distance / diag
    obs[1] = (view_data.priority - 1) / 2.0
    obs[2] = min(view_data.q_sel / QUEUE_NORM, 1.0)
    for i, cand in enumerate(view_data.candidates[:n]):
        base = 3 + 3 * i
        obs[base] = (cand + 1) / cfg.num_uavs
        obs[base + 1] = view_data.cand_distance[i] / diag
        obs[base + 2] = min(view_data.cand_capability[i] / QUEUE_NORM, 1.0)
    return obs


def compute_weight(q_sel: int, cfg: SimConfig) -> float:
    """Queue-length-linear weight between path and loss-tolerance rewards."""
    q = float(min(max(q_sel, cfg.reward_q_min), cfg.reward_q_max))
    k = (cfg.reward_w_min - cfg.reward_w_max) / (cfg.reward_q_max - cfg.reward_q_min)
    b = cfg.reward_w_max - k * cfg.reward_q_min
    return k * q + b


def path_reward(
    n: int, own_distance: float, cand_distance: float | None, priority: int, cfg: SimConfig
) -> float:
    """Positive, diagonal-normalized progress toward the GBS; otherwise a
    priority-scaled penalty."""
    if n != 0 and cand_distance is not None and own_distance > cand_distance:
        return (own_distance - cand_distance) / cfg.arena_diagonal
    return -cfg.path_penalties[priority - 1]


def tolerance_reward(n: int, a_n: float, q_sel: int, capability: int, cfg: SimConfig) -> float:
    """Smooth feasibility alignment of the planned volume vs capability."""
    if n == 0:
        return -cfg.tol_zero_penalty
    arg = cfg.tol_sign * cfg.tol_k1 * (a_n * q_sel - capability) / cfg.tol_q_scale + cfg.tol_k2
    return float(np.tanh(arg))


def compute_reward(view: AgentView, a: np.ndarray, cfg: SimConfig) -> float:
    """r_m = sum_n a_n * (w * r_st + (1 - w) * r_tol) over the valid dims."""
    w = compute_weight(view.q_sel, cfg)
    total = 0.0
    valid = 1 + len(view.candidates)
    for n in range(valid):
        if n == 0:
            r_st = path_reward(0, view.own_distance, None, view.priority, cfg)
            r_tol = tolerance_reward(0, a[0], view.q_sel, 0, cfg)
        else:
            r_st = path_reward(
                n, view.own_distance, float(view.cand_distance[n - 1]), view.priority, cfg
            )
            r_tol = tolerance_reward(
                n, float(a[n]), view.q_sel, int(view.cand_capability[n - 1]), cfg
            )
        total += float(a[n]) * (w * r_st + (1.0 - w) * r_tol)
    return total
