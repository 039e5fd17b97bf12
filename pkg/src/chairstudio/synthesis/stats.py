"""Sanity statistics comparing generated samples against a reference set."""

from __future__ import annotations

import torch

from ..errors import EmptyDataset, ShapeError


def _check_batch(t: torch.Tensor, name: str) -> torch.Tensor:
    if t.dim() != 4 or t.shape[1] != 3:
        raise ShapeError(f"{name} must be (n, 3, h, w), got {tuple(t.shape)}")
    if t.shape[0] == 0:
        raise EmptyDataset(f"{name} is empty")
    return t.double()


def distribution_report(samples: torch.Tensor, real: torch.Tensor) -> dict:
    """Per-channel moment gaps plus a normalized nearest-neighbor distance.

    The NN distance is the per-pixel RMSE from each sample to its closest
    reference image, averaged over samples; identical sets score zero.
    """
    samples = _check_batch(samples, "samples")
    real = _check_batch(real, "real")
    if samples.shape[1:] != real.shape[1:]:
        raise ShapeError(
            f"resolution mismatch: samples {tuple(samples.shape[1:])} "
            f"vs real {tuple(real.shape[1:])}"
        )

    mean_gap = (samples.mean(dim=(0, 2, 3)) - real.mean(dim=(0, 2, 3))).abs()
    std_gap = (
        samples.std(dim=(0, 2, 3), unbiased=False) - real.std(dim=(0, 2, 3), unbiased=False)
    ).abs()

    flat_s = samples.reshape(samples.shape[0], -1)
    flat_r = real.reshape(real.shape[0], -1)
    dim = flat_s.shape[1]
    nn_dists = []
    chunk = max(1, (1 << 22) // max(dim, 1))
    for start in range(0, flat_s.shape[0], chunk):
        d = torch.cdist(flat_s[start : start + chunk], flat_r)
        nn_dists.append(d.min(dim=1).values)
    mean_nn = float(torch.cat(nn_dists).mean() / dim**0.5)

    return {
        "channel_mean_gap": [float(v) for v in mean_gap],
        "channel_std_gap": [float(v) for v in std_gap],
        "mean_gap": float(mean_gap.mean()),
        "std_gap": float(std_gap.mean()),
        "mean_nn_distance": mean_nn,
        "n_samples": samples.shape[0],
        "n_real": real.shape[0],
    }
