"""Split-and-forward execution and episode metrics.

One slot is a strict pipeline: decisions are collected, per-receiver
demands aggregated, buffer grants arbitrated, and only then is state
mutated.  Share quantization and receiver arbitration both use
largest-remainder rounding: deterministic and sum-preserving.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .entities import Packet, TrafficFlow


@dataclass
class SplitDecision:
    owner: int
    ratios: np.ndarray          # length N+1; index 0 retains, index n -> n-th candidate
    candidates: list            # ascending global ids, s_m(t)
    source_priority: int

    def validate(self, tol: float = 1e-9) -> None:
        r = self.ratios
        if np.any(r < -tol) or np.any(r > 1.0 + tol):
            raise ValueError("invalid split: component outside [0, 1]")
        if abs(float(r.sum()) - 1.0) > tol:
            raise ValueError("invalid split: components must sum to 1")
        if np.any(np.abs(r[1 + len(self.candidates):]) > tol):
            raise ValueError("invalid split: mass on padded candidate slots")


def largest_remainder(shares: np.ndarray, total: int) -> np.ndarray:
    """Integer quantities proportional to `shares`, summing exactly to
    `total`.  Leftover units go to the largest fractional remainders,
    lower index on ties."""
    shares = np.asarray(shares, dtype=np.float64)
    s = shares.sum()
    if total == 0 or s <= 0.0:
        return np.zeros(shares.shape[0], dtype=np.int64)
    quota = shares * (total / s)
    base = np.floor(quota).astype(np.int64)
    rem = total - int(base.sum())
    if rem > 0:
        frac = quota - base
        order = np.lexsort((np.arange(shares.shape[0]), -frac))
        base[order[:rem]] += 1
    return base


def arbitrate_receiver(demands: dict[int, int], q_free: int) -> dict[int, int]:
    """Grant buffer space to competing senders.

    Grants are proportional with largest-remainder rounding; remainder
    units go to descending fractional remainder, ascending sender id on
    ties.  Sum of grants = min(sum of demands, q_free).
    """
    senders = sorted(demands)
    dem = np.array([demands[s] for s in senders], dtype=np.int64)
    total = int(dem.sum())
    if total <= q_free:
        return dict(demands)
    grants = largest_remainder(dem.astype(np.float64), q_free)
    return {s: int(g) for s, g in zip(senders, grants)}


@dataclass
class SlotLedger:
    transmitted: dict = field(default_factory=dict)   # (m, m') -> packets
    forward_loss: dict = field(default_factory=dict)  # m -> packets destroyed
    overflow_loss: int = 0
    delivered: list = field(default_factory=list)     # (pkt_id, slot)
    retained: dict = field(default_factory=dict)      # m -> packets kept queued


@dataclass
class EpisodeMetrics:
    total_packets: int = 0
    delivered: int = 0
    on_time: int = 0
    forward_loss: int = 0
    overflow_loss: int = 0
    expired: int = 0
    still_queued: int = 0
    deviations: list = field(default_factory=list)        # arrival - deadline, seconds
    task_deviations: list = field(default_factory=list)   # per fully-arrived flow
    flows_total: int = 0
    flows_on_time: int = 0
    loss_cap: float = 1.0

    @property
    def loss_ratio(self) -> float:
        return self.forward_loss / self.total_packets if self.total_packets else 0.0

    @property
    def delivery_ratio(self) -> float:
        return self.on_time / self.total_packets if self.total_packets else 0.0

    @property
    def loss_cap_ok(self) -> bool:
        return self.loss_ratio <= self.loss_cap

    def conservation_holds(self) -> bool:
        return (
            self.total_packets
            == self.delivered
            + self.forward_loss
            + self.overflow_loss
            + self.still_queued
            + self.expired
        )


def finalize_metrics(
    flows: list[TrafficFlow],
    delivered_packets: list[Packet],
    forward_loss: int,
    overflow_loss: int,
    expired: int,
    still_queued: int,
    slot_len: float,
    loss_cap: float = 1.0,
) -> EpisodeMetrics:
    """Episode-level loss/delivery ratios and deviation samples.

    Arrival time is the actual elapsed slots (arrival - gen + 1) * dt; a
    flow counts as arrived once its last packet has arrived.
    """
    metrics = EpisodeMetrics(loss_cap=loss_cap)
    metrics.total_packets = sum(f.packet_count for f in flows)
    metrics.forward_loss = forward_loss
    metrics.overflow_loss = overflow_loss
    metrics.expired = expired
    metrics.still_queued = still_queued
    metrics.flows_total = len(flows)

    flow_deadline = {f.flow_id: f.deadline for f in flows}
    flow_counts = {f.flow_id: f.packet_count for f in flows}
    flow_arrived: dict[int, list[float]] = {}
    for pkt in delivered_packets:
        metrics.delivered += 1
        arrival_abs = pkt.gen_slot * slot_len + (pkt.arrival_slot - pkt.gen_slot + 1) * slot_len
        dev = arrival_abs - pkt.deadline
        metrics.deviations.append(dev)
        if dev <= 0.0:
            metrics.on_time += 1
        flow_arrived.setdefault(pkt.flow_id, []).append(arrival_abs)

    for fid, arrivals in flow_arrived.items():
        if len(arrivals) == flow_counts[fid]:
            dev = max(arrivals) - flow_deadline[fid]
            metrics.task_deviations.append(dev)
            if dev <= 0.0:
                metrics.flows_on_time += 1
    return metrics
