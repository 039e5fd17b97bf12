"""Normalized-image currency and PNG round-trips.

Every image in the pipeline is a float32 torch tensor of shape
(3, H, W) with values in [-1, 1]; batches add a leading dimension.
A uint8 pixel p maps to 2*p/255 - 1 on load and back via rounding on
save, so a load/save round-trip of an 8-bit file is lossless.
"""

from __future__ import annotations

import hashlib
import io
from pathlib import Path

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, ShapeError


def to_normalized(arr: np.ndarray) -> torch.Tensor:
    """Convert an (H, W, 3) uint8 array to a (3, H, W) tensor in [-1, 1]."""
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ShapeError(f"expected (H, W, 3) uint8 array, got {arr.shape}")
    # copy=True: PIL hands out read-only buffers torch cannot wrap
    t = torch.from_numpy(np.array(arr, dtype=np.uint8, copy=True)).to(torch.float32)
    return (t * (2.0 / 255.0) - 1.0).permute(2, 0, 1).contiguous()


def to_uint8(image: torch.Tensor) -> np.ndarray:
    """Quantize a (3, H, W) tensor in [-1, 1] back to (H, W, 3) uint8."""
    if image.dim() != 3 or image.shape[0] != 3:
        raise ShapeError(f"expected (3, H, W) tensor, got {tuple(image.shape)}")
    arr = image.detach().to(torch.float32).clamp(-1.0, 1.0)
    arr = ((arr + 1.0) * (255.0 / 2.0)).round().to(torch.uint8)
    return arr.permute(1, 2, 0).contiguous().numpy()


def load_image(path: str | Path) -> torch.Tensor:
    """Decode an image file into a normalized tensor."""
    try:
        with Image.open(path) as im:
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc
    return to_normalized(arr)


def save_image(image: torch.Tensor, path: str | Path) -> None:
    """Write a normalized tensor as a PNG file (deterministic bytes)."""
    Image.fromarray(to_uint8(image)).save(path, format="PNG")


def png_bytes(image: torch.Tensor) -> bytes:
    """Encode a normalized tensor to PNG in memory (same bytes as save_image)."""
    buf = io.BytesIO()
    Image.fromarray(to_uint8(image)).save(buf, format="PNG")
    return buf.getvalue()


def validate_normalized(image: torch.Tensor, name: str = "image") -> None:
    """Raise unless `image` is a finite (3, H, W) or (N, 3, H, W) tensor in [-1, 1]."""
    if image.dim() not in (3, 4) or image.shape[-3] != 3:
        raise ShapeError(f"{name}: expected (3, H, W) or (N, 3, H, W), got {tuple(image.shape)}")
    if not torch.isfinite(image).all():
        raise ShapeError(f"{name}: contains non-finite values")
    if image.min() < -1.0 or image.max() > 1.0:
        raise ShapeError(f"{name}: values outside [-1, 1]")


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
