"""Geometry-preserving preprocessing of corpus images."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image, UnidentifiedImageError

from ..errors import DecodeError, ShapeError
from ..imgio import to_normalized


def preprocess(record, target_resolution: int) -> torch.Tensor:
    """Decode, resize, and crop one image to a square normalized tensor.

    The shortest side is resized to `target_resolution` (bicubic), then a
    center crop makes the output square. Accepts an ImageRecord or a path.
    """
    path = Path(getattr(record, "path", record))
    if target_resolution < 1:
        raise ValueError(f"target_resolution must be >= 1, got {target_resolution}")
    try:
        with Image.open(path) as im:
            rgb = im.convert("RGB")
            w, h = rgb.size
            short = min(w, h)
            new_w = max(target_resolution, round(w * target_resolution / short))
            new_h = max(target_resolution, round(h * target_resolution / short))
            resized = rgb.resize((new_w, new_h), Image.BICUBIC)
            left = (new_w - target_resolution) // 2
            top = (new_h - target_resolution) // 2
            cropped = resized.crop(
                (left, top, left + target_resolution, top + target_resolution)
            )
            arr = np.asarray(cropped, dtype=np.uint8)
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc
    return to_normalized(arr)


def downscale(image: torch.Tensor, factor: int) -> torch.Tensor:
    """Bicubic (antialiased) downscale by an integer factor, clamped to [-1, 1].

    Both height and width must be divisible by `factor`.
    """
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    squeeze = image.dim() == 3
    batch = image.unsqueeze(0) if squeeze else image
    if batch.dim() != 4:
        raise ShapeError(f"expected (3, H, W) or (N, 3, H, W), got {tuple(image.shape)}")
    h, w = batch.shape[-2], batch.shape[-1]
    if h % factor or w % factor:
        raise ShapeError(f"dims {h}x{w} not divisible by factor {factor}")
    if factor == 1:
        out = batch.clone()
    else:
        out = F.interpolate(
            batch, size=(h // factor, w // factor), mode="bicubic", antialias=True
        ).clamp(-1.0, 1.0)
    return out.squeeze(0) if squeeze else out
