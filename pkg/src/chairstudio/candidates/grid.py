"""Contact-sheet export: tile super-resolved candidates into one image."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import torch

from ..errors import ConfigError, ShapeError
from ..imgio import load_image, to_uint8
from .catalog import CandidateCatalog

PAD = 4
BACKGROUND = 255


def export_grid(
    catalog: CandidateCatalog,
    ids: list[str],
    columns: int,
    pad: int = PAD,
) -> np.ndarray:
    """Tile the sr images of `ids` row-major into one uint8 sheet.

    Every tile sits in a frame of `pad` pixels on each side, so the
    sheet is columns*(tile+2*pad)+pad wide and rows*(tile+2*pad)+pad
    tall (the +pad closes the outer edge).
    """
    if not ids:
        raise ConfigError("ids must be non-empty")
    if columns < 1:
        raise ConfigError("columns must be >= 1")
    if pad < 0:
        raise ConfigError("pad must be >= 0")
    images = [load_image(catalog.image_path(cid, "sr")) for cid in ids]
    tile = images[0].shape[1]
    for cid, img in zip(ids, images):
        if img.shape[1] != tile or img.shape[2] != tile:
            raise ShapeError(f"candidate {cid} image is not {tile}x{tile}")

    rows = math.ceil(len(ids) / columns)
    cell = tile + 2 * pad
    sheet = np.full((rows * cell + pad, columns * cell + pad, 3), BACKGROUND, dtype=np.uint8)
    for i, img in enumerate(images):
        r, c = divmod(i, columns)
        y = pad + r * cell
        x = pad + c * cell
        sheet[y : y + tile, x : x + tile] = to_uint8(img)
    return sheet


def save_grid(
    catalog: CandidateCatalog,
    ids: list[str],
    columns: int,
    out_path: str | Path,
    pad: int = PAD,
) -> Path:
    from PIL import Image

    sheet = export_grid(catalog, ids, columns, pad)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(sheet).save(out_path, format="PNG")
    return out_path


def grid_to_tensor(sheet: np.ndarray) -> torch.Tensor:
    from ..imgio import to_normalized

    return to_normalized(sheet)
