"""Network heads: masked sparsemax, Dirichlet density/entropy in torch,
step-vs-sequence consistency of the recurrent encoder."""

import numpy as np
import pytest
import torch
from scipy.special import digamma, gammaln
from scipy.stats import dirichlet as scipy_dirichlet

from uavflow import simplex
from uavflow.nets import (
    ActorNet,
    CriticNet,
    DTYPE,
    NetConfig,
    concentration_from_tendency,
    dirichlet_entropy,
    dirichlet_log_prob,
    make_networks,
    make_optimizer,
    sparsemax_masked,
)


def test_sparsemax_masked_agrees_with_numpy_on_full_mask():
    rng = np.random.default_rng(0)
    z = rng.normal(size=(50, 7))
    valid = torch.ones(50, 7, dtype=torch.bool)
    out = sparsemax_masked(torch.as_tensor(z, dtype=DTYPE), valid).numpy()
    expect = np.stack([simplex.sparsemax(row) for row in z])
    assert np.allclose(out, expect, atol=1e-12)


def test_sparsemax_masked_restricts_support():
    z = torch.tensor([[0.9, 5.0, 0.1, 0.2]], dtype=DTYPE)
    valid = torch.tensor([[True, False, True, True]])
    out = sparsemax_masked(z, valid)
    assert out[0, 1] == 0.0
    assert out.sum() == pytest.approx(1.0, abs=1e-12)
    # equals plain sparsemax on the valid sub-vector
    sub = simplex.sparsemax(np.array([0.9, 0.1, 0.2]))
    assert np.allclose(out[0, [0, 2, 3]].numpy(), sub, atol=1e-12)


def test_concentration_from_tendency_matches_numpy_path():
    rng = np.random.default_rng(1)
    beta = rng.normal(size=5)
    conc = simplex.build_concentration(beta, valid_dims=3)
    valid = torch.tensor([[True, True, True, False, False]])
    alpha = concentration_from_tendency(
        torch.as_tensor(beta[None, :], dtype=DTYPE), valid, 30.0, 0.5, 1e-8
    )
    assert np.allclose(alpha[0].numpy(), conc.alpha, atol=1e-12)


def test_dirichlet_log_prob_matches_scipy():
    rng = np.random.default_rng(2)
    for _ in range(20):
        k = rng.integers(2, 6)
        alpha = rng.uniform(0.5, 5.0, size=k)
        a = rng.dirichlet(alpha)
        a = np.clip(a, 1e-9, 1 - 1e-9)
        a = a / a.sum()
        got = dirichlet_log_prob(
            torch.as_tensor(a[None, :], dtype=DTYPE),
            torch.as_tensor(alpha[None, :], dtype=DTYPE),
        ).item()
        assert got == pytest.approx(scipy_dirichlet.logpdf(a, alpha), rel=1e-9)


def test_dirichlet_entropy_matches_scipy():
    rng = np.random.default_rng(3)
    for _ in range(10):
        alpha = rng.uniform(0.5, 8.0, size=4)
        got = dirichlet_entropy(torch.as_tensor(alpha[None, :], dtype=DTYPE)).item()
        assert got == pytest.approx(scipy_dirichlet.entropy(alpha), rel=1e-9)


def test_dirichlet_entropy_masked_equals_sub_distribution():
    alpha_valid = np.array([10.0, 3.0, 0.5])
    alpha_full = np.concatenate([alpha_valid, [1e-8, 1e-8]])
    valid = torch.tensor([[True, True, True, False, False]])
    got = dirichlet_entropy(
        torch.as_tensor(alpha_full[None, :], dtype=DTYPE), valid
    ).item()
    assert got == pytest.approx(scipy_dirichlet.entropy(alpha_valid), rel=1e-9)
    # magnitude stays O(1); the naive full-vector entropy explodes
    naive = dirichlet_entropy(torch.as_tensor(alpha_full[None, :], dtype=DTYPE)).item()
    assert abs(got) < 50.0
    assert naive < -1e7


def _toy_nc():
    return NetConfig(num_neighbors=2, f1_dim=4, f2_dim=6, gru_dim=6, critic_hidden=4)


def test_network_shapes_and_uniform_start():
    nc = _toy_nc()
    actor, critic = make_networks(nc, seed=0)
    own = torch.zeros(5, 3, dtype=DTYPE)
    neigh = torch.zeros(5, nc.obs_neigh, dtype=DTYPE)
    beta, h = actor(own, neigh, actor.initial_hidden(5))
    assert beta.shape == (5, nc.action_dim)
    assert h.shape == (5, nc.gru_dim)
    # near-zero head: the induced split starts near uniform
    valid = torch.ones(5, nc.action_dim, dtype=torch.bool)
    sp = sparsemax_masked(beta, valid)
    assert torch.allclose(sp, torch.full_like(sp, 1.0 / nc.action_dim), atol=0.05)
    v, hc = critic(own, neigh, critic.initial_hidden(5))
    assert v.shape == (5,)
    assert hc.shape == (5, nc.gru_dim)


def test_forward_sequence_matches_stepwise():
    nc = _toy_nc()
    actor, critic = make_networks(nc, seed=1)
    rng = np.random.default_rng(4)
    own = torch.as_tensor(rng.normal(size=(3, 7, 3)), dtype=DTYPE)
    neigh = torch.as_tensor(rng.normal(size=(3, 7, nc.obs_neigh)), dtype=DTYPE)
    with torch.no_grad():
        seq = actor.forward_sequence(own, neigh, actor.initial_hidden(3))
        h = actor.initial_hidden(3)
        steps = []
        for t in range(7):
            out, h = actor(own[:, t], neigh[:, t], h)
            steps.append(out)
        stepped = torch.stack(steps, dim=1)
    assert torch.allclose(seq, stepped, atol=1e-12)
    with torch.no_grad():
        vseq = critic.forward_sequence(own, neigh, critic.initial_hidden(3))
        h = critic.initial_hidden(3)
        vsteps = []
        for t in range(7):
            v, h = critic(own[:, t], neigh[:, t], h)
            vsteps.append(v)
    assert torch.allclose(vseq, torch.stack(vsteps, dim=1), atol=1e-12)


def test_make_networks_seeded_and_double():
    nc = _toy_nc()
    a1, _ = make_networks(nc, seed=9)
    a2, _ = make_networks(nc, seed=9)
    for p1, p2 in zip(a1.parameters(), a2.parameters()):
        assert torch.equal(p1, p2)
        assert p1.dtype == torch.float64


def test_optimizer_decoupled_weight_decay():
    # one step on a zero-gradient parameter shrinks it by exactly lr*wd
    p = torch.nn.Parameter(torch.tensor([2.0], dtype=DTYPE))
    opt = make_optimizer([p], lr=2e-4, weight_decay=1e-3)
    p.grad = torch.zeros_like(p)
    opt.step()
    assert p.item() == pytest.approx(2.0 * (1.0 - 2e-4 * 1e-3), rel=1e-12)
