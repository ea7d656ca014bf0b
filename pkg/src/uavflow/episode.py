"""One-episode simulation loop.

Slot pipeline (strict order): mobility -> reclassify -> in-flight
arrivals -> local traffic -> link table -> decisions -> receiver
arbitration -> execution.  Transmitted packets become available at the
receiver on the next slot (store-and-forward, one hop per slot).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import mobility
from .channel import build_link_table
from .config import RngStreams, SimConfig
from .entities import Packet, TrafficFlow, segment_flow
from .envmarl import AgentView, build_observation, compute_reward, feasible_capability
from .forwarding import (
    EpisodeMetrics,
    SplitDecision,
    arbitrate_receiver,
    finalize_metrics,
    largest_remainder,
)
from .queues import PriorityQueues
from .simplex import forwarding_count, resample


@dataclass
class ActionRecord:
    """What a policy returns for one acting agent."""

    ratios: np.ndarray                  # raw simplex vector, length N+1
    alpha: np.ndarray | None = None     # Dirichlet concentration (IPPO only)
    log_prob: float = 0.0
    value: float = 0.0
    valid_dims: int = 1


@dataclass
class Transition:
    observation: np.ndarray
    valid_dims: int
    alpha: np.ndarray
    action: np.ndarray
    log_prob: float
    value: float
    reward: float
    slot: int
    next_observation: np.ndarray | None = None


@dataclass
class Rollout:
    """Per-agent transition sequences for one episode."""

    per_agent: dict = field(default_factory=dict)

    def append(self, agent: int, tr: Transition) -> None:
        self.per_agent.setdefault(agent, []).append(tr)

    def finalize(self) -> None:
        # next_observation = following acted-slot observation, zeros at end
        for seq in self.per_agent.values():
            for i, tr in enumerate(seq):
                if i + 1 < len(seq):
                    tr.next_observation = seq[i + 1].observation
                else:
                    tr.next_observation = np.zeros_like(tr.observation)

    def num_transitions(self) -> int:
        return sum(len(s) for s in self.per_agent.values())

    def mean_reward(self) -> float:
        rewards = [tr.reward for seq in self.per_agent.values() for tr in seq]
        return float(np.mean(rewards)) if rewards else 0.0


@dataclass
class EpisodeResult:
    metrics: EpisodeMetrics
    rollout: Rollout | None
    flows: list


def run_episode(
    cfg: SimConfig,
    policy,
    streams: RngStreams,
    collect: bool = False,
    event_writer=None,
    trajectory_writer=None,
    link_writer=None,
) -> EpisodeResult:
    m_count = cfg.num_uavs
    gbs_id = m_count
    kin = mobility.init_positions(cfg, streams.mobility)
    queues = [
        PriorityQueues(q_max=int(streams.traffic.integers(cfg.buffer_min, cfg.buffer_max + 1)))
        for _ in range(m_count)
    ]
    policy.reset(cfg)

    flows: list[TrafficFlow] = []
    delivered: list[Packet] = []
    in_flight: list[tuple[int, list[Packet]]] = []
    forward_loss = 0
    overflow_loss = 0
    next_pkt_id = 0
    next_flow_id = 0
    rollout = Rollout() if collect else None

    for t in range(cfg.num_slots):
        now = t * cfg.slot_len
        if t > 0:
            kin = [mobility.step(k, cfg, streams.mobility) for k in kin]
        positions = np.array([k.position for k in kin])
        if trajectory_writer is not None:
            for m, k in enumerate(kin):
                trajectory_writer.writerow(
                    [t, m, f"{k.position[0]:.6f}", f"{k.position[1]:.6f}", f"{k.position[2]:.6f}"]
                )

        for q in queues:
            q.reclassify(now, purge_expired=cfg.purge_expired)

        # arrivals from the previous slot, then fresh local traffic
        for rx, pkts in in_flight:
            _, over = queues[rx].enqueue(pkts, now)
            overflow_loss += over
        in_flight = []

        for m in range(m_count):
            if streams.traffic.random() < cfg.traffic_prob:
                size_mb = streams.traffic.uniform(cfg.traffic_mb_min, cfg.traffic_mb_max)
                flow = TrafficFlow(
                    flow_id=next_flow_id,
                    source=m,
                    gen_slot=t,
                    size_bits=int(round(size_mb * 8e6)),
                    deadline=cfg.deadline_for_size(size_mb, now),
                )
                next_flow_id += 1
                pkts = segment_flow(flow, cfg.packet_bits, next_pkt_id)
                next_pkt_id += len(pkts)
                flows.append(flow)
                _, over = queues[m].enqueue(pkts, now)
                overflow_loss += over
                if event_writer is not None:
                    event_writer.writerow([t, "generate", m, "", flow.flow_id])

        active = np.array([len(q) > 0 for q in queues])
        if not active.any():
            continue
        table = build_link_table(positions, active, cfg, streams.channel)
        if link_writer is not None:
            for i in np.flatnonzero(active):
                for j in list(table.candidates[i]) + [gbs_id]:
                    sinr_db = 10 * np.log10(table.sinr[i, j]) if table.sinr[i, j] > 0 else -np.inf
                    link_writer.writerow(
                        [t, i, j, f"{sinr_db:.3f}", f"{table.rate[i, j]:.1f}", table.capacity[i, j]]
                    )

        # phase 1: direct GBS delivery and decision collection
        views = []
        for m in range(m_count):
            if not active[m]:
                continue
            prio, q_sel = queues[m].select()
            if table.gbs_reachable[m]:
                n_tx = min(q_sel, int(table.capacity[m, gbs_id]))
                for pkt in queues[m].pop_selected(n_tx):
                    pkt.hop_trace.append(gbs_id)
                    pkt.arrival_slot = t
                    delivered.append(pkt)
                    if event_writer is not None:
                        event_writer.writerow([t, "deliver", m, gbs_id, pkt.pkt_id])
                continue
            cands = table.candidates[m]
            view = AgentView(
                agent=m,
                observation=np.empty(0),
                candidates=cands,
                cand_distance=np.array([table.d_gbs(c) for c in cands]),
                cand_capability=np.array(
                    [feasible_capability(table, m, c, queues[c].q_free) for c in cands],
                    dtype=np.int64,
                ),
                own_distance=table.d_gbs(m),
                priority=prio,
                q_sel=q_sel,
                gbs_reachable=False,
            )
            view.observation = build_observation(view, cfg)
            views.append(view)

        if not views:
            continue
        records = policy.act_batch(views, streams)

        # phase 2: quantize shares and aggregate receiver demands
        plans = []
        demands_by_rx: dict[int, dict[int, int]] = {}
        for view, rec in zip(views, records):
            ratios = rec.ratios
            if getattr(policy, "use_resampling", False):
                omega = forwarding_count(
                    view.q_sel, cfg.q_step, cfg.max_neighbors, len(view.candidates)
                )
                ratios = resample(ratios, omega, 1 + len(view.candidates))
            decision = SplitDecision(
                owner=view.agent,
                ratios=ratios,
                candidates=view.candidates,
                source_priority=view.priority,
            )
            decision.validate()
            k = len(view.candidates)
            planned = largest_remainder(ratios[: 1 + k], view.q_sel)
            plans.append((view, rec, decision, planned))
            for n, cand in enumerate(view.candidates, start=1):
                if planned[n] > 0:
                    demand = int(min(planned[n], table.capacity[view.agent, cand]))
                    demands_by_rx.setdefault(cand, {})[view.agent] = demand

        # phase 3: receiver-side buffer arbitration
        grants = {
            rx: arbitrate_receiver(dem, queues[rx].q_free) for rx, dem in demands_by_rx.items()
        }

        # phase 4: state mutation
        for view, rec, decision, planned in plans:
            m = view.agent
            reward = compute_reward(view, rec.ratios, cfg)
            if collect:
                rollout.append(
                    m,
                    Transition(
                        observation=view.observation,
                        valid_dims=rec.valid_dims,
                        alpha=rec.alpha,
                        action=rec.ratios,
                        log_prob=rec.log_prob,
                        value=rec.value,
                        reward=reward,
                        slot=t,
                    ),
                )
            for n, cand in enumerate(view.candidates, start=1):
                if planned[n] == 0:
                    continue
                grant = grants[cand].get(m, 0)
                q_trans = min(int(planned[n]), int(table.capacity[m, cand]), grant)
                batch = queues[m].pop_selected(int(planned[n]))
                sent, lost = batch[:q_trans], batch[q_trans:]
                if sent:
                    for pkt in sent:
                        pkt.hop_trace.append(cand)
                        if event_writer is not None:
                            event_writer.writerow([t, "forward", m, cand, pkt.pkt_id])
                    in_flight.append((cand, sent))
                forward_loss += len(lost)
                if event_writer is not None:
                    for pkt in lost:
                        event_writer.writerow([t, "drop", m, cand, pkt.pkt_id])

    still_queued = sum(len(q) for q in queues) + sum(len(p) for _, p in in_flight)
    expired = sum(len(q.expired) for q in queues)
    metrics = finalize_metrics(
        flows,
        delivered,
        forward_loss,
        overflow_loss,
        expired,
        still_queued,
        cfg.slot_len,
        cfg.loss_cap,
    )
    if rollout is not None:
        rollout.finalize()
    return EpisodeResult(metrics=metrics, rollout=rollout, flows=flows)
