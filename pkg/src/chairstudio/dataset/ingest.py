"""Corpus ingestion and the dataset manifest.

A manifest is the single source of truth for a training corpus: which
files belong to it, their content hashes, and the seeded train/holdout
split. Paths are stored relative to the manifest location so a corpus
tree can be moved or re-created elsewhere without changing bytes.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..errors import CorpusEmpty, NotFound
from ..imgio import sha256_file

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".webp"}
HOLDOUT_FRACTION = 0.05
MIN_SIDE = 8


@dataclass(frozen=True)
class ImageRecord:
    id: str
    path: str
    width: int
    height: int
    channels: int
    sha256: str


@dataclass
class DatasetManifest:
    """Ordered corpus records plus the seeded train/holdout split."""

    records: list[ImageRecord]
    target_resolution: int
    seed: int
    train_ids: list[str]
    holdout_ids: list[str]
    skipped: int = 0
    root: Path = field(default_factory=Path)

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError("manifest record ids are not unique")

    def __len__(self) -> int:
        return len(self.records)

    def record(self, record_id: str) -> ImageRecord:
        by_id = self.__dict__.setdefault("_by_id", {r.id: r for r in self.records})
        try:
            return by_id[record_id]
        except KeyError:
            raise NotFound(f"no record with id {record_id!r}") from None

    def resolve(self, record: "ImageRecord | str") -> Path:
        if isinstance(record, str):
            record = self.record(record)
        return (self.root / record.path).resolve()

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "seed": self.seed,
            "target_resolution": self.target_resolution,
            "skipped": self.skipped,
            "records": [
                {
                    "id": r.id,
                    "path": r.path,
                    "width": r.width,
                    "height": r.height,
                    "channels": r.channels,
                    "sha256": r.sha256,
                }
                for r in self.records
            ],
            "split": {"train": self.train_ids, "holdout": self.holdout_ids},
        }

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        doc = self.to_dict()
        root = path.parent.resolve()
        for rec in doc["records"]:
            rec["path"] = os.path.relpath((self.root / rec["path"]).resolve(), root)
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "DatasetManifest":
        path = Path(path)
        doc = json.loads(path.read_text())
        records = [ImageRecord(**r) for r in doc["records"]]
        return cls(
            records=records,
            target_resolution=doc["target_resolution"],
            seed=doc["seed"],
            train_ids=doc["split"]["train"],
            holdout_ids=doc["split"]["holdout"],
            skipped=doc.get("skipped", 0),
            root=path.parent.resolve(),
        )


def _record_id(relpath: Path) -> str:
    return str(relpath).replace(os.sep, "__").replace(".", "_")


def split_ids(ids: list[str], seed: int) -> tuple[list[str], list[str]]:
    """Deterministic 95/5 train/holdout split.

    A permutation of record positions is drawn from
    ``np.random.default_rng(seed)``; the first ``round(0.05 * n)``
    permuted positions (capped at n - 1) form the holdout. Both lists
    keep manifest order.
    """
    n = len(ids)
    k = min(n - 1, int(np.floor(n * HOLDOUT_FRACTION + 0.5))) if n > 1 else 0
    order = np.random.default_rng(seed).permutation(n)
    holdout_pos = set(int(i) for i in order[:k])
    train = [ids[i] for i in range(n) if i not in holdout_pos]
    holdout = [ids[i] for i in range(n) if i in holdout_pos]
    return train, holdout


def ingest_corpus(
    directory: str | Path, target_resolution: int, seed: int
) -> DatasetManifest:
    """Scan a directory tree for decodable images and build a manifest.

    Undecodable or degenerate (< 8 px per side) files are skipped and
    counted. Record order is sorted by relative path, so the manifest is
    identical on every run for the same tree and seed.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise CorpusEmpty(f"{directory} is not a directory")
    candidates = sorted(
        p for p in directory.rglob("*") if p.suffix.lower() in IMAGE_SUFFIXES
    )
    records: list[ImageRecord] = []
    skipped = 0
    for path in candidates:
        try:
            with Image.open(path) as im:
                w, h = im.size
        except (OSError, UnidentifiedImageError, ValueError):
            skipped += 1
            continue
        if w < MIN_SIDE or h < MIN_SIDE:
            skipped += 1
            continue
        rel = path.relative_to(directory)
        records.append(
            ImageRecord(
                id=_record_id(rel),
                path=str(rel),
                width=w,
                height=h,
                channels=3,
                sha256=sha256_file(path),
            )
        )
    if not records:
        raise CorpusEmpty(f"no decodable images in {directory}")
    train, holdout = split_ids([r.id for r in records], seed)
    return DatasetManifest(
        records=records,
        target_resolution=target_resolution,
        seed=seed,
        train_ids=train,
        holdout_ids=holdout,
        skipped=skipped,
        root=directory.resolve(),
    )
