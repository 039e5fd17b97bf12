"""Perceptual content loss and the combined super-resolution objective."""

from __future__ import annotations

import torch

from ..errors import ConfigError, EmptyDataset, ShapeError
from ..synthesis.losses import _as_prob_tensor


def perceptual_content_loss(phi_hr: torch.Tensor, phi_sr: torch.Tensor) -> torch.Tensor:
    """Squared feature-map distance, normalized by spatial size only.

    For maps of shape (c, h, w): sum over channels and positions of the
    squared difference, divided by h*w — channels are summed, not
    averaged. Batches (n, c, h, w) return the mean over the n maps.
    """
    if phi_hr.shape != phi_sr.shape:
        raise ShapeError(
            f"feature shapes differ: {tuple(phi_hr.shape)} vs {tuple(phi_sr.shape)}"
        )
    if phi_hr.dim() == 3:
        phi_hr = phi_hr.unsqueeze(0)
        phi_sr = phi_sr.unsqueeze(0)
    if phi_hr.dim() != 4:
        raise ShapeError(f"feature maps must be (c, h, w) or (n, c, h, w), got {tuple(phi_hr.shape)}")
    if phi_hr.numel() == 0:
        raise EmptyDataset("feature maps are empty")
    _, _, h, w = phi_hr.shape
    diff = (phi_hr - phi_sr) ** 2
    return diff.sum(dim=(1, 2, 3)).mean() / (h * w)


def sr_losses(
    d_hr,
    d_sr,
    content: torch.Tensor,
    adversarial_weight: float = 1e-3,
) -> tuple[torch.Tensor, torch.Tensor]:
    """SR discriminator loss and the combined generator objective.

    loss_d_sr = -mean(log d_hr) - mean(log(1 - d_sr));
    loss_g_sr = content + weight * (-mean(log d_sr)).
    With weight = 0 the generator objective equals the content term
    exactly.
    """
    if adversarial_weight < 0:
        raise ConfigError("adversarial_weight must be >= 0")
    hr = _as_prob_tensor(d_hr, "d_hr")
    sr = _as_prob_tensor(d_sr, "d_sr")
    content = torch.as_tensor(content)
    loss_d_sr = -torch.log(hr).mean() - torch.log(1.0 - sr).mean()
    loss_g_sr = content + adversarial_weight * (-torch.log(sr).mean())
    return loss_d_sr, loss_g_sr
