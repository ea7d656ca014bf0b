"""Execution-time policy wrapper around the actor/critic networks.

Sampling uses the dedicated numpy policy stream (torch RNG is touched
only at weight init), so seeded simulations are reproducible regardless
of torch versioning.
"""

from __future__ import annotations

import numpy as np
import torch

from .config import SimConfig
from .episode import ActionRecord
from .nets import (
    ActorNet,
    CriticNet,
    DTYPE,
    concentration_from_tendency,
    dirichlet_log_prob,
)
from .simplex import Concentration, sample


class DirichletPolicy:
    """Shared-parameter Dirichlet policy over the splitting simplex."""

    use_resampling = True

    def __init__(self, actor: ActorNet, critic: CriticNet | None, cfg: SimConfig):
        self.actor = actor
        self.critic = critic
        self.cfg = cfg
        self.hidden_actor = None
        self.hidden_critic = None

    def reset(self, cfg: SimConfig) -> None:
        m = cfg.num_uavs
        self.hidden_actor = self.actor.initial_hidden(m)
        if self.critic is not None:
            self.hidden_critic = self.critic.initial_hidden(m)

    def _split_obs(self, views) -> tuple[torch.Tensor, torch.Tensor]:
        obs = np.stack([v.observation for v in views])
        own = torch.as_tensor(obs[:, :3], dtype=DTYPE)
        neigh = torch.as_tensor(obs[:, 3:], dtype=DTYPE)
        return own, neigh

    def act_batch(self, views, streams) -> list[ActionRecord]:
        agents = [v.agent for v in views]
        own, neigh = self._split_obs(views)
        valid = torch.zeros(len(views), self.actor.nc.action_dim, dtype=torch.bool)
        for i, v in enumerate(views):
            valid[i, : 1 + len(v.candidates)] = True

        with torch.no_grad():
            beta, h_next = self.actor(own, neigh, self.hidden_actor[agents])
            self.hidden_actor[agents] = h_next
            alpha = concentration_from_tendency(
                beta, valid, self.cfg.conc_scale, self.cfg.conc_floor, self.cfg.mask_eps
            )
            values = torch.zeros(len(views), dtype=DTYPE)
            if self.critic is not None:
                values, hc_next = self.critic(own, neigh, self.hidden_critic[agents])
                self.hidden_critic[agents] = hc_next

            records = []
            alpha_np = alpha.numpy()
            for i, view in enumerate(views):
                conc = Concentration(alpha=alpha_np[i], valid_dims=1 + len(view.candidates))
                a = sample(conc, streams.policy)
                logp = dirichlet_log_prob(
                    torch.as_tensor(a, dtype=DTYPE), alpha[i]
                ).item()
                records.append(
                    ActionRecord(
                        ratios=a,
                        alpha=alpha_np[i].copy(),
                        log_prob=logp,
                        value=float(values[i]),
                        valid_dims=1 + len(view.candidates),
                    )
                )
        return records
