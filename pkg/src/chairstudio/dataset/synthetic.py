"""Procedural chair silhouettes for fully self-contained test corpora.

Each image is a flat-colored side-view chair (seat slab, backrest, and
2-4 legs reaching the bottom edge) on a solid background. Geometry and
colors are drawn from an RNG keyed by (seed, index), so a corpus is
byte-identical across runs and independent of generation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import IoError
from .ingest import DatasetManifest, ingest_corpus


@dataclass
class ChairParams:
    resolution: int
    background: tuple[int, int, int]
    body_color: tuple[int, int, int]
    leg_color: tuple[int, int, int]
    # rectangles as (y0, y1, x0, x1), end-exclusive
    seat: tuple[int, int, int, int]
    backrest: tuple[int, int, int, int]
    legs: list[tuple[int, int, int, int]]


def _distinct_color(rng: np.random.Generator, reference: np.ndarray) -> np.ndarray:
    # rejection keeps the silhouette visibly separated from the background
    while True:
        c = rng.integers(0, 256, size=3)
        if np.abs(c.astype(int) - reference.astype(int)).sum() >= 150:
            return c


def sample_chair_params(resolution: int, rng: np.random.Generator) -> ChairParams:
    """Draw randomized but well-formed chair geometry for one image."""
    r = resolution
    bg = rng.integers(0, 256, size=3)
    body = _distinct_color(rng, bg)
    leg = np.clip(body.astype(int) * 0.7, 0, 255).astype(np.int64)

    seat_y0 = int(rng.uniform(0.45, 0.60) * r)
    seat_h = max(2, int(rng.uniform(0.06, 0.14) * r))
    seat_x0 = int(rng.uniform(0.10, 0.22) * r)
    seat_x1 = int(rng.uniform(0.78, 0.92) * r)
    seat = (seat_y0, seat_y0 + seat_h, seat_x0, seat_x1)

    back_w = max(2, int(rng.uniform(0.06, 0.16) * r))
    back_top = int(rng.uniform(0.08, 0.30) * r)
    if rng.integers(0, 2) == 0:
        back = (back_top, seat_y0 + seat_h, seat_x0, seat_x0 + back_w)
    else:
        back = (back_top, seat_y0 + seat_h, seat_x1 - back_w, seat_x1)

    n_legs = int(rng.integers(2, 5))
    leg_w = max(1, int(rng.uniform(0.025, 0.06) * r))
    floor_gap = int(rng.integers(0, max(1, r // 32)))
    leg_y1 = r - floor_gap
    span = seat_x1 - seat_x0 - leg_w
    legs = []
    for k in range(n_legs):
        frac = 0.0 if n_legs == 1 else k / (n_legs - 1)
        x0 = seat_x0 + int(round(frac * span))
        legs.append((seat_y0 + seat_h, leg_y1, x0, x0 + leg_w))

    return ChairParams(
        resolution=r,
        background=tuple(int(v) for v in bg),
        body_color=tuple(int(v) for v in body),
        leg_color=tuple(int(v) for v in leg),
        seat=seat,
        backrest=back,
        legs=legs,
    )


def draw_chair(params: ChairParams) -> np.ndarray:
    """Render chair geometry to an (R, R, 3) uint8 array."""
    r = params.resolution
    img = np.empty((r, r, 3), dtype=np.uint8)
    img[:, :] = params.background
    for rect, color in (
        (params.seat, params.body_color),
        (params.backrest, params.body_color),
        *((leg, params.leg_color) for leg in params.legs),
    ):
        y0, y1, x0, x1 = rect
        img[y0:y1, x0:x1] = color
    return img


def synth_chair_corpus(
    n: int, resolution: int, seed: int, out_dir: str | Path
) -> DatasetManifest:
    """Write `n` procedural chair PNGs and ingest them into a manifest."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if resolution < 16:
        raise ValueError(f"resolution must be >= 16, got {resolution}")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for i in range(n):
            rng = np.random.default_rng([seed & 0xFFFFFFFF, i])
            img = draw_chair(sample_chair_params(resolution, rng))
            Image.fromarray(img).save(out_dir / f"chair_{i:05d}.png", format="PNG")
    except OSError as exc:
        raise IoError(f"cannot write corpus to {out_dir}: {exc}") from exc
    return ingest_corpus(out_dir, resolution, seed)
