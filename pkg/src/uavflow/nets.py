"""Actor/critic networks and the Dirichlet head, in torch (float64).

Architecture: an own-state MLP, a neighbor MLP feeding a GRU cell for
temporal context, and a fusion MLP.  Actor and critic share the topology
but never the parameters.  Autodiff and AdamW come from torch; the
acceptance suite still checks the full composite gradient against finite
differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

DTYPE = torch.float64


@dataclass(frozen=True)
class NetConfig:
    obs_own: int = 3
    num_neighbors: int = 8           # N; neighbor input is 3N wide
    f1_dim: int = 128
    f2_dim: int = 256
    gru_dim: int = 256
    critic_hidden: int = 128
    head_init_scale: float = 0.01    # near-zero tendency head for uniform start

    @property
    def obs_neigh(self) -> int:
        return 3 * self.num_neighbors

    @property
    def action_dim(self) -> int:
        return self.num_neighbors + 1


def _mlp(in_dim: int, out_dim: int) -> nn.Sequential:
    # one hidden layer sized like the output, tanh activations
    return nn.Sequential(
        nn.Linear(in_dim, out_dim, dtype=DTYPE),
        nn.Tanh(),
        nn.Linear(out_dim, out_dim, dtype=DTYPE),
    )


class Encoder(nn.Module):
    """Shared three-stage encoding: f1 on own state, f2+GRU on neighbors."""

    def __init__(self, nc: NetConfig):
        super().__init__()
        self.nc = nc
        self.f1 = nn.Sequential(*_mlp(nc.obs_own, nc.f1_dim), nn.Tanh())
        self.f2 = nn.Sequential(*_mlp(nc.obs_neigh, nc.f2_dim), nn.Tanh())
        self.gru = nn.GRU(nc.f2_dim, nc.gru_dim, batch_first=True).to(DTYPE)

    def forward(self, own, neigh, h_prev):
        h_own = self.f1(own)
        _, h_next = self.gru(self.f2(neigh).unsqueeze(1), h_prev.unsqueeze(0))
        h_neigh = h_next.squeeze(0)
        return torch.cat([h_own, h_neigh], dim=-1), h_neigh

    def forward_sequence(self, own, neigh, h0):
        """Whole-sequence encoding: own (B, L, 3), neigh (B, L, 3N),
        h0 (B, gru_dim) -> fused (B, L, f1_dim + gru_dim)."""
        h_own = self.f1(own)
        out, _ = self.gru(self.f2(neigh), h0.unsqueeze(0))
        return torch.cat([h_own, out], dim=-1)


class ActorNet(nn.Module):
    def __init__(self, nc: NetConfig):
        super().__init__()
        self.nc = nc
        self.encoder = Encoder(nc)
        self.f3 = _mlp(nc.f1_dim + nc.gru_dim, nc.action_dim)
        with torch.no_grad():
            head = self.f3[-1]
            head.weight.mul_(nc.head_init_scale)
            head.bias.zero_()

    def forward(self, own, neigh, h_prev):
        fused, h_next = self.encoder(own, neigh, h_prev)
        return self.f3(fused), h_next

    def forward_sequence(self, own, neigh, h0):
        return self.f3(self.encoder.forward_sequence(own, neigh, h0))

    def initial_hidden(self, batch: int) -> torch.Tensor:
        return torch.zeros(batch, self.nc.gru_dim, dtype=DTYPE)


class CriticNet(nn.Module):
    def __init__(self, nc: NetConfig):
        super().__init__()
        self.nc = nc
        self.encoder = Encoder(nc)
        self.head = nn.Sequential(
            nn.Linear(nc.f1_dim + nc.gru_dim, nc.critic_hidden, dtype=DTYPE),
            nn.Tanh(),
            nn.Linear(nc.critic_hidden, 1, dtype=DTYPE),
        )

    def forward(self, own, neigh, h_prev):
        fused, h_next = self.encoder(own, neigh, h_prev)
        return self.head(fused).squeeze(-1), h_next

    def forward_sequence(self, own, neigh, h0):
        return self.head(self.encoder.forward_sequence(own, neigh, h0)).squeeze(-1)

    def initial_hidden(self, batch: int) -> torch.Tensor:
        return torch.zeros(batch, self.nc.gru_dim, dtype=DTYPE)


def sparsemax_masked(z: torch.Tensor, valid: torch.Tensor) -> torch.Tensor:
    """Row-wise simplex projection restricted to the valid dims.

    `valid` is a boolean mask; invalid entries get exactly zero output and
    contribute nothing to the projection.
    """
    # large-but-finite sentinel: keeps cumsum finite while guaranteeing
    # invalid dims never enter the support (the retain dim is always valid)
    neg = -1e30
    zm = torch.where(valid, z, torch.full_like(z, neg))
    srt, _ = torch.sort(zm, dim=-1, descending=True)
    cssv = torch.cumsum(srt, dim=-1) - 1.0
    k = torch.arange(1, z.shape[-1] + 1, dtype=z.dtype, device=z.device)
    support = srt - cssv / k > 0
    rho = support.sum(dim=-1)
    tau = cssv.gather(-1, (rho - 1).unsqueeze(-1)).squeeze(-1) / rho.to(z.dtype)
    out = torch.clamp(zm - tau.unsqueeze(-1), min=0.0)
    return torch.where(valid, out, torch.zeros_like(out))


def concentration_from_tendency(
    beta: torch.Tensor,
    valid: torch.Tensor,
    scale: float,
    floor: float,
    mask_eps: float,
) -> torch.Tensor:
    """alpha = scale * sparsemax(beta) + floor on valid dims, eps elsewhere."""
    sp = sparsemax_masked(beta, valid)
    alpha = scale * sp + floor
    return torch.where(valid, alpha, torch.full_like(alpha, mask_eps))


def dirichlet_log_prob(a: torch.Tensor, alpha: torch.Tensor) -> torch.Tensor:
    """Row-wise Dirichlet log-density (actions must be interior)."""
    return (
        torch.lgamma(alpha.sum(dim=-1))
        - torch.lgamma(alpha).sum(dim=-1)
        + ((alpha - 1.0) * torch.log(a)).sum(dim=-1)
    )


def dirichlet_entropy(alpha: torch.Tensor, valid: torch.Tensor | None = None) -> torch.Tensor:
    """Row-wise differential entropy of Dir(alpha).

    When `valid` is given, entropy is taken over the sub-distribution on
    the valid support only.  Masked dims carry negligible probability mass
    but, with concentrations near zero, would each contribute a huge
    negative constant (digamma(eps) ~ -1/eps) that swamps the regularizer.
    """
    if valid is None:
        valid = torch.ones_like(alpha, dtype=torch.bool)
    zero = torch.zeros_like(alpha)
    total = torch.where(valid, alpha, zero).sum(dim=-1)
    log_norm = torch.lgamma(total) - torch.where(
        valid, torch.lgamma(alpha), zero
    ).sum(dim=-1)
    terms = (alpha - 1.0) * (torch.digamma(alpha) - torch.digamma(total).unsqueeze(-1))
    return -torch.where(valid, terms, zero).sum(dim=-1) - log_norm


def make_networks(
    nc: NetConfig, seed: int | None = None
) -> tuple[ActorNet, CriticNet]:
    if seed is not None:
        torch.manual_seed(seed)
    return ActorNet(nc), CriticNet(nc)


def make_optimizer(params, lr: float = 2e-4, weight_decay: float = 1e-3):
    """Adaptive moments with decoupled weight decay."""
    return torch.optim.AdamW(params, lr=lr, weight_decay=weight_decay)
