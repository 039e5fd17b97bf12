"""Latent-space exploration: interpolation paths and local neighborhoods."""

from __future__ import annotations

import torch

from ..errors import ConfigError, ShapeError

MODES = ("linear", "spherical")


def _pair(a: torch.Tensor, b: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
    a = torch.as_tensor(a).reshape(-1)
    b = torch.as_tensor(b).reshape(-1)
    if not a.dtype.is_floating_point:
        a = a.to(torch.float32)
    if not b.dtype.is_floating_point:
        b = b.to(torch.float32)
    if a.shape != b.shape:
        raise ShapeError(f"latent dims differ: {a.shape[0]} vs {b.shape[0]}")
    if a.numel() == 0:
        raise ShapeError("latents must be non-empty")
    dtype = torch.promote_types(a.dtype, b.dtype)
    return a.to(dtype), b.to(dtype)


def interpolate_latents(
    a: torch.Tensor, b: torch.Tensor, steps: int, mode: str = "linear"
) -> torch.Tensor:
    """A path of `steps` latents from a to b with exact endpoints.

    Linear interpolation moves along the chord; spherical interpolation
    rotates at constant angular rate between the two vectors (falling
    back to linear when they are nearly parallel). Interior points are
    clamped onto [-1, 1] so every step stays a valid latent.
    """
    if steps < 2:
        raise ConfigError("steps must be >= 2 so both endpoints appear")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    a, b = _pair(a, b)
    # the path itself is computed in double so spherical steps hold their
    # norm to ~1e-15 relative; the result is cast back to the input dtype
    a64, b64 = a.double(), b.double()
    ts = torch.linspace(0.0, 1.0, steps, dtype=torch.float64)
    if mode == "linear":
        path = a64.unsqueeze(0) + ts.unsqueeze(1) * (b64 - a64).unsqueeze(0)
    else:
        na, nb = a64.norm(), b64.norm()
        if float(na) == 0.0 or float(nb) == 0.0:
            path = a64.unsqueeze(0) + ts.unsqueeze(1) * (b64 - a64).unsqueeze(0)
        else:
            cos = torch.clamp(torch.dot(a64, b64) / (na * nb), -1.0, 1.0)
            omega = torch.acos(cos)
            if float(omega) < 1e-6:
                path = a64.unsqueeze(0) + ts.unsqueeze(1) * (b64 - a64).unsqueeze(0)
            else:
                so = torch.sin(omega)
                wa = torch.sin((1.0 - ts) * omega) / so
                wb = torch.sin(ts * omega) / so
                path = wa.unsqueeze(1) * a64.unsqueeze(0) + wb.unsqueeze(1) * b64.unsqueeze(0)
    path = path.clamp(-1.0, 1.0).to(a.dtype)
    path[0] = a
    path[-1] = b
    return path


def neighborhood_samples(
    center: torch.Tensor, radius: float, n: int, seed: int
) -> torch.Tensor:
    """n perturbations of `center`, offsets uniform in [-radius, radius]^dim.

    Results are clamped onto the latent cube and are a pure function of
    (center, radius, n, seed).
    """
    if radius <= 0:
        raise ConfigError("radius must be positive")
    if n < 1:
        raise ConfigError("n must be >= 1")
    center = torch.as_tensor(center, dtype=torch.float32).reshape(-1)
    if center.numel() == 0:
        raise ShapeError("center latent must be non-empty")
    gen = torch.Generator().manual_seed(seed & 0x7FFFFFFFFFFFFFFF)
    offsets = (torch.rand(n, center.shape[0], generator=gen) * 2.0 - 1.0) * radius
    return (center.unsqueeze(0) + offsets).clamp(-1.0, 1.0)
