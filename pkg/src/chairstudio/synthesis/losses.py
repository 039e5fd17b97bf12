"""Adversarial losses and latent sampling."""

from __future__ import annotations

import torch

from ..errors import ConfigError, EmptyDataset
from .models import PROB_EPS

LOSS_MODES = ("non_saturating", "saturating")


def _as_prob_tensor(values, name: str) -> torch.Tensor:
    t = torch.as_tensor(values)
    if not t.is_floating_point():
        t = t.double()
    if t.numel() == 0:
        raise EmptyDataset(f"{name} batch is empty")
    return t.reshape(-1).clamp(PROB_EPS, 1.0 - PROB_EPS)


def adversarial_losses(
    d_real, d_fake, mode: str = "non_saturating"
) -> tuple[torch.Tensor, torch.Tensor]:
    """Discriminator and generator losses from probability batches.

    loss_d = -mean(log d_real) - mean(log(1 - d_fake)).
    loss_g is -mean(log d_fake) by default (the non-saturating form);
    "saturating" selects mean(log(1 - d_fake)) instead. Probabilities
    are clamped away from {0, 1} so every log stays finite.
    """
    if mode not in LOSS_MODES:
        raise ConfigError(f"mode must be one of {LOSS_MODES}, got {mode!r}")
    real = _as_prob_tensor(d_real, "d_real")
    fake = _as_prob_tensor(d_fake, "d_fake")
    loss_d = -torch.log(real).mean() - torch.log(1.0 - fake).mean()
    if mode == "non_saturating":
        loss_g = -torch.log(fake).mean()
    else:
        loss_g = torch.log(1.0 - fake).mean()
    return loss_d, loss_g


def sample_latent(n: int, seed: int, dim: int = 100) -> torch.Tensor:
    """Draw n latent vectors uniformly from [-1, 1]^dim, keyed by seed."""
    if n < 1:
        raise EmptyDataset("latent sample count must be >= 1")
    if dim < 1:
        raise ConfigError("latent dim must be >= 1")
    gen = torch.Generator().manual_seed(seed & 0x7FFFFFFFFFFFFFFF)
    return torch.rand(n, dim, generator=gen) * 2.0 - 1.0
