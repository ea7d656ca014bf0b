"""Operations on the probability simplex: sparsemax, Dirichlet
concentrations, sampling, log-density, entropy, and the execution-time
traffic-aware resampling.

Everything here is numpy-level and pure given an RNG stream.  The
differentiable (torch) sparsemax used inside the policy network lives in
`nets`; both must agree with the projection oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, gammaln

from .kernels import sparsemax_batch

BOUNDARY_CLAMP = 1e-12


def sparsemax(z: np.ndarray) -> np.ndarray:
    """Euclidean projection of z onto the simplex (sort-based threshold)."""
    return sparsemax_batch(np.asarray(z, dtype=np.float64))


@dataclass(frozen=True)
class Concentration:
    """Dirichlet concentration vector with masking bookkeeping.

    `alpha` has full length N+1; entries at and beyond `valid_dims` carry
    the mask constant so the distribution stays well defined while putting
    negligible mass on padded candidates.
    """

    alpha: np.ndarray
    valid_dims: int

    def __post_init__(self):
        if np.any(self.alpha <= 0):
            raise ValueError("Dirichlet concentrations must be positive")

    @property
    def total(self) -> float:
        return float(np.sum(self.alpha))


def build_concentration(
    beta: np.ndarray,
    valid_dims: int,
    scale: float = 30.0,
    floor: float = 0.5,
    mask_eps: float = 1e-8,
) -> Concentration:
    """scale * sparsemax(beta) + floor on the valid dims, mask elsewhere."""
    if valid_dims < 1:
        raise ValueError("valid_dims must be at least 1 (the retain slot)")
    beta = np.asarray(beta, dtype=np.float64)
    alpha = np.full(beta.shape, mask_eps)
    v = min(valid_dims, beta.shape[0])
    alpha[:v] = scale * sparsemax(beta[:v]) + floor
    return Concentration(alpha=alpha, valid_dims=v)


def _gamma_variates(alpha: float, rng: np.random.Generator, n: int) -> np.ndarray:
    # Boost for shape < 1: G(a) = G(a+1) * U^(1/a), evaluated in log space
    # so that masked dims (alpha ~ 1e-8) underflow to 0 instead of NaN.
    if alpha >= 1.0:
        return rng.gamma(alpha, size=n)
    y = rng.gamma(alpha + 1.0, size=n)
    u = rng.random(n)
    out = np.zeros(n)
    ok = (y > 0.0) & (u > 0.0)
    with np.errstate(under="ignore"):
        out[ok] = np.exp(np.log(y[ok]) + np.log(u[ok]) / alpha)
    return out


def sample_batch(conc: Concentration, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw `n` simplex vectors via normalized Gamma variates, shape (n, k).

    Components are clamped away from the simplex boundary and renormalized
    so the stored actions always have a finite log-density.
    """
    g = np.column_stack([_gamma_variates(a, rng, n) for a in conc.alpha])
    total = g.sum(axis=1)
    g[total <= 0.0] = 1.0
    a = g / g.sum(axis=1, keepdims=True)
    a = np.clip(a, BOUNDARY_CLAMP, 1.0 - BOUNDARY_CLAMP)
    return a / a.sum(axis=1, keepdims=True)


def sample(conc: Concentration, rng: np.random.Generator) -> np.ndarray:
    """Draw one simplex vector; see sample_batch."""
    return sample_batch(conc, rng, 1)[0]


def log_prob(a: np.ndarray, conc: Concentration) -> float:
    """Dirichlet log-density of an interior simplex point."""
    a = np.asarray(a, dtype=np.float64)
    if np.any(a <= 0.0) or np.any(a >= 1.0):
        raise ValueError("boundary sample: log_prob requires an interior point")
    alpha = conc.alpha
    return float(
        gammaln(alpha.sum()) - gammaln(alpha).sum() + np.dot(alpha - 1.0, np.log(a))
    )


def entropy(conc: Concentration) -> float:
    """Differential entropy of Dir(alpha) over the valid support.

    Masked dims carry negligible mass but would each contribute a huge
    negative constant (digamma(eps) ~ -1/eps), so they are excluded.
    """
    alpha = conc.alpha[: conc.valid_dims]
    total = alpha.sum()
    log_norm = gammaln(total) - gammaln(alpha).sum()   # ln C(alpha)
    return float(-np.dot(alpha - 1.0, digamma(alpha) - digamma(total)) - log_norm)


def dirichlet_mean(conc: Concentration) -> np.ndarray:
    return conc.alpha / conc.total


def dirichlet_var(conc: Concentration) -> np.ndarray:
    t = conc.total
    return conc.alpha * (t - conc.alpha) / (t * t * (t + 1.0))


def forwarding_count(q_sel: int, q_step: int, max_neighbors: int, num_candidates: int) -> int:
    """Traffic-scaled number of forwarding nodes, capped at N and at the
    actual candidate count."""
    if q_sel < 1:
        raise ValueError("q_sel must be at least 1")
    omega = min(math.ceil(q_sel / q_step), max_neighbors)
    return min(omega, num_candidates)


def resample(a: np.ndarray, omega_sel: int, valid_dims: int) -> np.ndarray:
    """Execution-time truncation: keep a_0 plus the omega_sel largest
    neighbor entries (lower index wins ties), renormalize the kept mass."""
    a = np.asarray(a, dtype=np.float64)
    out = np.zeros_like(a)
    out[0] = a[0]
    neigh = a[1:valid_dims]
    if omega_sel > 0 and neigh.size > 0:
        # stable top-k with lower-index tiebreak: sort by (-value, index)
        order = np.lexsort((np.arange(neigh.size), -neigh))
        keep = order[: min(omega_sel, neigh.size)]
        out[1 + keep] = neigh[keep]
    total = out.sum()
    if total <= 0.0:
        out[0] = 1.0
        return out
    return out / total
