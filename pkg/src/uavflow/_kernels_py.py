"""Pure-numpy implementations of the hot per-slot kernels.

Mirrors the Cython module `_kernels`; `kernels` picks whichever is
importable.  Keep the two in exact numerical agreement.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def sparsemax_batch(z: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of z onto the probability simplex."""
    z = np.asarray(z, dtype=np.float64)
    squeeze = z.ndim == 1
    if squeeze:
        z = z[None, :]
    if not np.all(np.isfinite(z)):
        raise ValueError("sparsemax requires finite inputs")
    n = z.shape[1]
    s = np.sort(z, axis=1)[:, ::-1]
    cssv = np.cumsum(s, axis=1) - 1.0
    k = np.arange(1, n + 1)
    cond = s - cssv / k > 0
    rho = np.count_nonzero(cond, axis=1)
    tau = cssv[np.arange(z.shape[0]), rho - 1] / rho
    out = np.maximum(z - tau[:, None], 0.0)
    return out[0] if squeeze else out


def pair_gains(
    pos: np.ndarray,
    gbs: np.ndarray,
    beta0_lin: float,
    d1: float,
    d2: float,
    eta_los_lin: float,
    eta_nlos_lin: float,
    ple: float,
    fc: float,
    c_light: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Channel gains for all ordered node pairs.

    Returns (dist, h), both shape (M, M+1); column M is the GBS link.
    UAV-UAV links are free-space inverse-square from the 1 m reference
    gain; UAV-GBS links mix LoS/NLoS path loss through the elevation
    S-curve.  Diagonal entries are zero.
    """
    pos = np.asarray(pos, dtype=np.float64)
    m = pos.shape[0]
    dist = np.zeros((m, m + 1))
    h = np.zeros((m, m + 1))

    diff = pos[:, None, :] - pos[None, :, :]
    d_uav = np.sqrt(np.sum(diff * diff, axis=2))
    dist[:, :m] = d_uav
    with np.errstate(divide="ignore"):
        h_uav = beta0_lin / (d_uav * d_uav)
    np.fill_diagonal(h_uav, 0.0)
    h[:, :m] = h_uav

    dg = pos - np.asarray(gbs, dtype=np.float64)[None, :]
    d_gbs = np.sqrt(np.sum(dg * dg, axis=1))
    dist[:, m] = d_gbs
    theta = np.degrees(np.arcsin(np.clip(pos[:, 2] / d_gbs, -1.0, 1.0)))
    p_los = 1.0 / (1.0 + d1 * np.exp(-d2 * (theta - d1)))
    fs = (4.0 * np.pi * fc * d_gbs / c_light) ** ple
    loss = p_los * eta_los_lin * fs + (1.0 - p_los) * eta_nlos_lin * fs
    h[:, m] = 1.0 / loss
    return dist, h


def sinr_table(
    h: np.ndarray,
    sub: np.ndarray,
    active: np.ndarray,
    p_tx: float,
    noise: float,
    num_subchannels: int,
) -> np.ndarray:
    """Per ordered pair SINR (linear) for active transmitters.

    ``sub[i]`` is the subchannel of active transmitter i (-1 if idle).
    The interference at a receiver is the co-channel sum over active
    transmitters other than the sender itself.  Rows of idle transmitters
    are zero.
    """
    m = h.shape[0]
    sinr = np.zeros_like(h)
    # per-subchannel received-power sums at every receiver column
    act = np.flatnonzero(active)
    if act.size == 0:
        return sinr
    power = np.zeros((num_subchannels, h.shape[1]))
    for i in act:
        power[sub[i]] += p_tx * h[i]
    for i in act:
        interf = power[sub[i]] - p_tx * h[i]
        sinr[i] = p_tx * h[i] / (noise + interf)
        sinr[i, i] = 0.0
    return sinr
