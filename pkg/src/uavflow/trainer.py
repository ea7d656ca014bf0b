"""PPO machinery: rollout batching, GAE, clipped losses, training loop.

Updates are full-batch over the episode buffer (a few thousand tuples at
most), actor then critic, for a fixed number of rounds per episode.  The
networks used during collection are implicitly the "old" networks: their
log-probs and values are stored with each transition before any update
touches the parameters.
"""

from __future__ import annotations

import csv
import os
from dataclasses import asdict, dataclass, fields, replace

import numpy as np
import torch

from .config import RngStreams, SimConfig, episode_seed
from .episode import Rollout, run_episode
from .nets import (
    DTYPE,
    NetConfig,
    concentration_from_tendency,
    dirichlet_entropy,
    dirichlet_log_prob,
    make_networks,
    make_optimizer,
)
from .policy import DirichletPolicy


@dataclass(frozen=True)
class TrainConfig:
    episodes: int = 3500          # N_epi
    update_rounds: int = 5        # N_upd
    gamma: float = 0.95
    gae_lambda: float = 0.95
    clip_ratio: float = 0.05      # epsilon_1
    clip_value: float = 0.2       # epsilon_2
    entropy_coef: float = 0.01
    learning_rate: float = 2e-4
    weight_decay: float = 1e-3
    critic_loss_literal: bool = False  # keep the published sign verbatim

    def validate(self) -> "TrainConfig":
        if not 0.0 <= self.gamma <= 1.0 or not 0.0 <= self.gae_lambda <= 1.0:
            raise ValueError("gamma and lambda must lie in [0, 1]")
        if self.clip_ratio <= 0 or self.clip_value <= 0:
            raise ValueError("clipping thresholds must be positive")
        return self


def compute_gae(
    rewards: np.ndarray,
    values_old: np.ndarray,
    gamma: float,
    lam: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Recursive GAE over one agent trajectory, bootstrapping zero value
    past the terminal step.  Returns (advantages, value targets)."""
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values_old, dtype=np.float64)
    n = rewards.shape[0]
    v_next = np.append(values[1:], 0.0)
    deltas = rewards + gamma * v_next - values
    adv = np.zeros(n)
    acc = 0.0
    for t in range(n - 1, -1, -1):
        acc = deltas[t] + gamma * lam * acc
        adv[t] = acc
    targets = rewards + gamma * v_next
    return adv, targets


def clipped_objective(ratio: torch.Tensor, adv: torch.Tensor, eps: float) -> torch.Tensor:
    return torch.minimum(ratio * adv, torch.clamp(ratio, 1.0 - eps, 1.0 + eps) * adv)


@dataclass
class Batch:
    """Padded per-agent sequences plus flattened per-transition tensors."""

    own: torch.Tensor          # (A, L, 3)
    neigh: torch.Tensor        # (A, L, 3N)
    mask: torch.Tensor         # (A, L) bool
    valid: torch.Tensor        # (A, L, K) bool, Dirichlet dims
    actions: torch.Tensor      # (A, L, K)
    logp_old: torch.Tensor     # (A, L)
    value_old: torch.Tensor    # (A, L)
    advantage: torch.Tensor    # (A, L), normalized
    target: torch.Tensor       # (A, L)

    @property
    def size(self) -> int:
        return int(self.mask.sum())


def build_batch(rollout: Rollout, cfg: SimConfig, tc: TrainConfig) -> Batch | None:
    agents = sorted(a for a, seq in rollout.per_agent.items() if seq)
    if not agents:
        return None
    k = cfg.max_neighbors + 1
    length = max(len(rollout.per_agent[a]) for a in agents)
    n_agents = len(agents)
    obs_dim = 3 + 3 * cfg.max_neighbors

    own = torch.zeros(n_agents, length, 3, dtype=DTYPE)
    neigh = torch.zeros(n_agents, length, obs_dim - 3, dtype=DTYPE)
    mask = torch.zeros(n_agents, length, dtype=torch.bool)
    valid = torch.zeros(n_agents, length, k, dtype=torch.bool)
    actions = torch.zeros(n_agents, length, k, dtype=DTYPE)
    logp_old = torch.zeros(n_agents, length, dtype=DTYPE)
    value_old = torch.zeros(n_agents, length, dtype=DTYPE)
    advantage = torch.zeros(n_agents, length, dtype=DTYPE)
    target = torch.zeros(n_agents, length, dtype=DTYPE)

    for i, agent in enumerate(agents):
        seq = rollout.per_agent[agent]
        adv, tgt = compute_gae(
            np.array([tr.reward for tr in seq]),
            np.array([tr.value for tr in seq]),
            tc.gamma,
            tc.gae_lambda,
        )
        for j, tr in enumerate(seq):
            own[i, j] = torch.as_tensor(tr.observation[:3], dtype=DTYPE)
            neigh[i, j] = torch.as_tensor(tr.observation[3:], dtype=DTYPE)
            mask[i, j] = True
            valid[i, j, : tr.valid_dims] = True
            actions[i, j] = torch.as_tensor(tr.action, dtype=DTYPE)
            logp_old[i, j] = tr.log_prob
            value_old[i, j] = tr.value
            advantage[i, j] = adv[j]
            target[i, j] = tgt[j]

    flat = advantage[mask]
    advantage[mask] = (flat - flat.mean()) / (flat.std(unbiased=False) + 1e-8)
    return Batch(own, neigh, mask, valid, actions, logp_old, value_old, advantage, target)


def _unroll(net, own: torch.Tensor, neigh: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """Run the recurrent encoder over the padded sequences.  Per-agent
    sequences are contiguous (padding only at the tail), so a single
    whole-sequence pass is exact; padded outputs are masked out later."""
    return net.forward_sequence(own, neigh, net.initial_hidden(mask.shape[0]))


def actor_loss(actor, batch: Batch, cfg: SimConfig, tc: TrainConfig) -> tuple[torch.Tensor, dict]:
    beta = _unroll(actor, batch.own, batch.neigh, batch.mask)
    m = batch.mask
    alpha = concentration_from_tendency(
        beta[m], batch.valid[m], cfg.conc_scale, cfg.conc_floor, cfg.mask_eps
    )
    logp = dirichlet_log_prob(batch.actions[m], alpha)
    if not torch.isfinite(logp).all():
        bad = torch.nonzero(~torch.isfinite(logp)).flatten().tolist()
        raise FloatingPointError(f"non-finite log-prob for buffer tuples {bad}")
    ratio = torch.exp(logp - batch.logp_old[m])
    l_clip = clipped_objective(ratio, batch.advantage[m], tc.clip_ratio)
    ent = dirichlet_entropy(alpha, batch.valid[m])
    loss = -(l_clip - tc.entropy_coef * ent).mean()
    stats = {
        "entropy": float(ent.detach().mean()),
        "ratio_mean": float(ratio.detach().mean()),
    }
    return loss, stats


def critic_loss(critic, batch: Batch, tc: TrainConfig) -> torch.Tensor:
    values = _unroll(critic, batch.own, batch.neigh, batch.mask)
    m = batch.mask
    v = values[m]
    v_old = batch.value_old[m]
    v_clip = v_old + torch.clamp(v - v_old, -tc.clip_value, tc.clip_value)
    err = torch.minimum((v - batch.target[m]) ** 2, (v_clip - batch.target[m]) ** 2)
    loss = err.mean()
    return -loss if tc.critic_loss_literal else loss


@dataclass
class EpisodeStats:
    episode: int
    mean_reward: float
    actor_loss: float
    critic_loss: float
    entropy: float
    delivery_ratio: float
    loss_ratio: float


class IppoTrainer:
    def __init__(self, cfg: SimConfig, tc: TrainConfig, master_seed: int):
        self.cfg = cfg
        self.tc = tc.validate()
        self.master_seed = master_seed
        nc = NetConfig(num_neighbors=cfg.max_neighbors)
        self.actor, self.critic = make_networks(nc, seed=master_seed)
        self.opt_actor = make_optimizer(
            self.actor.parameters(), tc.learning_rate, tc.weight_decay
        )
        self.opt_critic = make_optimizer(
            self.critic.parameters(), tc.learning_rate, tc.weight_decay
        )
        self.policy = DirichletPolicy(self.actor, self.critic, cfg)
        self.history: list[EpisodeStats] = []
        self.start_episode = 0

    def train(self, episodes: int | None = None, progress=None) -> list[EpisodeStats]:
        n_epi = self.tc.episodes if episodes is None else episodes
        for ep in range(self.start_episode, self.start_episode + n_epi):
            streams = RngStreams(episode_seed(self.master_seed, ep))
            result = run_episode(self.cfg, self.policy, streams, collect=True)
            batch = build_batch(result.rollout, self.cfg, self.tc)
            a_loss = c_loss = ent = 0.0
            if batch is not None:
                for _ in range(self.tc.update_rounds):
                    loss, stats = actor_loss(self.actor, batch, self.cfg, self.tc)
                    self.opt_actor.zero_grad()
                    loss.backward()
                    self.opt_actor.step()
                    a_loss, ent = float(loss.detach()), stats["entropy"]

                    loss_c = critic_loss(self.critic, batch, self.tc)
                    self.opt_critic.zero_grad()
                    loss_c.backward()
                    self.opt_critic.step()
                    c_loss = float(loss_c.detach())
            stats = EpisodeStats(
                episode=ep,
                mean_reward=result.rollout.mean_reward(),
                actor_loss=a_loss,
                critic_loss=c_loss,
                entropy=ent,
                delivery_ratio=result.metrics.delivery_ratio,
                loss_ratio=result.metrics.loss_ratio,
            )
            self.history.append(stats)
            if progress is not None:
                progress(stats)
        self.start_episode += n_epi
        return self.history

    def save_checkpoint(self, path: str) -> None:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        torch.save(
            {
                "format_version": 1,
                "actor": self.actor.state_dict(),
                "critic": self.critic.state_dict(),
                "opt_actor": self.opt_actor.state_dict(),
                "opt_critic": self.opt_critic.state_dict(),
                "sim_config": asdict(self.cfg),
                "train_config": asdict(self.tc),
                "master_seed": self.master_seed,
                "episode": self.start_episode,
            },
            path,
        )

    def save_curve(self, path: str) -> None:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["episode", "mean_reward", "actor_loss", "critic_loss", "entropy",
                 "delivery_ratio", "loss_ratio"]
            )
            for s in self.history:
                writer.writerow(
                    [s.episode, f"{s.mean_reward:.12g}", f"{s.actor_loss:.12g}",
                     f"{s.critic_loss:.12g}", f"{s.entropy:.12g}",
                     f"{s.delivery_ratio:.12g}", f"{s.loss_ratio:.12g}"]
                )


def load_checkpoint(path: str) -> IppoTrainer:
    data = torch.load(path, weights_only=False)
    sim_fields = {f.name for f in fields(SimConfig)}
    cfg = replace(
        SimConfig(), **{k: v for k, v in data["sim_config"].items() if k in sim_fields}
    )
    if isinstance(cfg.mean_velocity, list):  # tuples round-trip as lists
        cfg = replace(
            cfg,
            mean_velocity=tuple(cfg.mean_velocity),
            v_min=tuple(cfg.v_min),
            v_max=tuple(cfg.v_max),
            gm_noise_std=tuple(cfg.gm_noise_std),
            path_penalties=tuple(cfg.path_penalties),
        )
    tc = TrainConfig(**data["train_config"])
    trainer = IppoTrainer(cfg, tc, data["master_seed"])
    trainer.actor.load_state_dict(data["actor"])
    trainer.critic.load_state_dict(data["critic"])
    trainer.opt_actor.load_state_dict(data["opt_actor"])
    trainer.opt_critic.load_state_dict(data["opt_critic"])
    trainer.start_episode = data["episode"]
    return trainer


def policy_from_checkpoint(path: str, cfg: SimConfig | None = None) -> DirichletPolicy:
    trainer = load_checkpoint(path)
    return DirichletPolicy(trainer.actor, None, cfg or trainer.cfg)
