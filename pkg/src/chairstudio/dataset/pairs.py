"""Low/high-resolution training pairs for the super-resolution stage."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import torch

from ..errors import DecodeError, ShapeError
from ..imgio import load_image, save_image
from .ingest import DatasetManifest
from .transforms import downscale, preprocess


@dataclass
class ResolutionPair:
    hr: torch.Tensor
    lr: torch.Tensor
    source_id: str

    def __post_init__(self):
        if self.hr.shape[-2] % 4 or self.hr.shape[-1] % 4:
            raise ShapeError(f"hr dims {tuple(self.hr.shape)} not divisible by 4")


@dataclass
class PairSet:
    """List-like bundle of pairs plus the count of skipped records."""

    pairs: list[ResolutionPair]
    skipped: int = 0

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]


def make_sr_pairs(
    manifest: DatasetManifest,
    hr_resolution: int,
    factor: int,
    ids: list[str] | None = None,
) -> PairSet:
    """Build one (hr, lr) pair per manifest record; lr = downscale(hr, factor).

    Records that fail to decode are skipped and counted. `ids` restricts
    the build to a subset (e.g. the train split).
    """
    if hr_resolution % factor:
        raise ShapeError(f"hr_resolution {hr_resolution} not divisible by factor {factor}")
    wanted = set(ids) if ids is not None else None
    pairs: list[ResolutionPair] = []
    skipped = 0
    for record in manifest.records:
        if wanted is not None and record.id not in wanted:
            continue
        try:
            hr = preprocess(manifest.resolve(record), hr_resolution)
        except DecodeError:
            skipped += 1
            continue
        pairs.append(ResolutionPair(hr=hr, lr=downscale(hr, factor), source_id=record.id))
    return PairSet(pairs=pairs, skipped=skipped)


def save_pairs(pairs: PairSet, out_dir: str | Path) -> Path:
    """Persist pairs as PNG files plus an index document.

    PNG quantization loses sub-8-bit precision, so reloaded pairs are
    close to but not bit-equal with the in-memory originals.
    """
    out_dir = Path(out_dir)
    (out_dir / "hr").mkdir(parents=True, exist_ok=True)
    (out_dir / "lr").mkdir(parents=True, exist_ok=True)
    index = []
    for i, pair in enumerate(pairs):
        name = f"{i:05d}_{pair.source_id}.png"
        save_image(pair.hr, out_dir / "hr" / name)
        save_image(pair.lr, out_dir / "lr" / name)
        index.append({"file": name, "source_id": pair.source_id})
    doc = {"version": 1, "skipped": pairs.skipped, "pairs": index}
    index_path = out_dir / "pairs.json"
    index_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return index_path


def load_pairs(pairs_dir: str | Path) -> PairSet:
    pairs_dir = Path(pairs_dir)
    doc = json.loads((pairs_dir / "pairs.json").read_text())
    pairs = [
        ResolutionPair(
            hr=load_image(pairs_dir / "hr" / entry["file"]),
            lr=load_image(pairs_dir / "lr" / entry["file"]),
            source_id=entry["source_id"],
        )
        for entry in doc["pairs"]
    ]
    return PairSet(pairs=pairs, skipped=doc.get("skipped", 0))
