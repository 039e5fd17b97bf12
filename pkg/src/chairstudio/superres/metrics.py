"""Reconstruction quality metrics and trivial upscaling baselines."""

from __future__ import annotations

import math

import torch
import torch.nn.functional as F

from ..errors import EmptyDataset, ShapeError
from .models import SCALE_FACTOR, SRGenerator, upscale


def psnr(a: torch.Tensor, b: torch.Tensor) -> float:
    """Peak signal-to-noise ratio in dB, computed on the [0, 1] scale.

    Inputs are normalized images on [-1, 1]; they are remapped to [0, 1]
    before the MSE so the conventional peak of 1.0 applies. Identical
    inputs return +inf.
    """
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {tuple(a.shape)} vs {tuple(b.shape)}")
    if a.numel() == 0:
        raise EmptyDataset("cannot compute psnr of empty tensors")
    a01 = (a.double() + 1.0) / 2.0
    b01 = (b.double() + 1.0) / 2.0
    mse = float(((a01 - b01) ** 2).mean())
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def nearest_upscale(lr: torch.Tensor, factor: int = SCALE_FACTOR) -> torch.Tensor:
    single = lr.dim() == 3
    batch = lr.unsqueeze(0) if single else lr
    out = F.interpolate(batch, scale_factor=factor, mode="nearest")
    return out.squeeze(0) if single else out


def bicubic_upscale(lr: torch.Tensor, factor: int = SCALE_FACTOR) -> torch.Tensor:
    single = lr.dim() == 3
    batch = lr.unsqueeze(0) if single else lr
    out = F.interpolate(batch, scale_factor=factor, mode="bicubic", align_corners=False)
    return out.clamp(-1.0, 1.0).squeeze(0) if single else out.clamp(-1.0, 1.0)


def evaluate_sr(generator, pairs) -> dict:
    """Per-pair and mean PSNR for the model against nearest/bicubic baselines.

    `generator` is an SRGenerator or any callable mapping an lr batch to
    an sr batch (e.g. a baseline stub).
    """
    if len(pairs) == 0:
        raise EmptyDataset("no pairs to evaluate")
    rows = []
    for pair in pairs:
        lr = pair.lr.unsqueeze(0)
        hr = pair.hr
        if isinstance(generator, SRGenerator):
            sr = upscale(generator, lr)[0]
        else:
            sr = generator(lr)[0]
        rows.append(
            {
                "source_id": pair.source_id,
                "psnr_model": psnr(sr, hr),
                "psnr_nearest": psnr(nearest_upscale(lr)[0], hr),
                "psnr_bicubic": psnr(bicubic_upscale(lr)[0], hr),
            }
        )

    def _mean(key: str) -> float:
        vals = [r[key] for r in rows]
        return math.inf if any(math.isinf(v) for v in vals) else sum(vals) / len(vals)

    return {
        "pairs": rows,
        "mean": {k: _mean(k) for k in ("psnr_model", "psnr_nearest", "psnr_bicubic")},
        "count": len(rows),
    }
