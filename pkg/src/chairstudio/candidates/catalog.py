"""Candidate catalog: batch generation, JSONL manifest, integrity checks.

A catalog directory holds a head document (`catalog.json`), an
append-only JSON-lines manifest (`catalog.jsonl`, one record per line),
and an `images/` directory with the low-res sample and its
super-resolved counterpart for every record. Paths in the manifest are
relative to the catalog root, and every generated artifact is a pure
function of (latents, checkpoints), so identical runs produce
byte-identical catalogs wherever they live.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import torch

from ..ckpt import ModelCheckpoint, load_checkpoint
from ..errors import CheckpointError, ConfigError, IoError, NotFound
from ..imgio import load_image, png_bytes, save_image, sha256_bytes, sha256_file
from ..superres.models import SCALE_FACTOR, SRGenerator, upscale
from ..superres.train import sr_generator_from_checkpoint
from ..synthesis.losses import sample_latent
from ..synthesis.models import Generator, generate
from ..synthesis.train import generator_from_checkpoint

HEAD_NAME = "catalog.json"
MANIFEST_NAME = "catalog.jsonl"
IMAGES_DIR = "images"
CATALOG_VERSION = 1
# Fixed default stamp: wall-clock time would break byte-identical re-runs.
CREATED_AT_DEFAULT = "1970-01-01T00:00:00Z"


@dataclass(frozen=True)
class CandidateRecord:
    id: str
    index: int
    latent: list[float]
    seed: int | None
    lr_path: str
    sr_path: str
    lr_sha256: str
    sr_sha256: str
    gen_checkpoint_hash: str
    sr_checkpoint_hash: str
    created_at: str = CREATED_AT_DEFAULT

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CandidateRecord":
        return cls(**d)

    def latent_tensor(self) -> torch.Tensor:
        return torch.tensor(self.latent, dtype=torch.float32)


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class CandidateCatalog:
    """Ordered candidate records plus the generation config snapshot."""

    def __init__(self, root: str | Path, head: dict, records: list[CandidateRecord]):
        self.root = Path(root)
        self.head = head
        self.records = records
        self._by_id = {r.id: r for r in records}
        if len(self._by_id) != len(records):
            raise ConfigError("catalog contains duplicate record ids")

    # -- access ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    def get(self, candidate_id: str) -> CandidateRecord:
        try:
            return self._by_id[candidate_id]
        except KeyError:
            raise NotFound(f"no candidate with id {candidate_id!r}") from None

    def __contains__(self, candidate_id: str) -> bool:
        return candidate_id in self._by_id

    def page(self, offset: int, limit: int) -> list[CandidateRecord]:
        if offset < 0 or limit < 0:
            raise ConfigError("offset and limit must be >= 0")
        return self.records[offset : offset + limit]

    def image_path(self, candidate_id: str, kind: str) -> Path:
        record = self.get(candidate_id)
        if kind not in ("lr", "sr"):
            raise ConfigError(f"kind must be 'lr' or 'sr', got {kind!r}")
        return self.root / (record.lr_path if kind == "lr" else record.sr_path)

    # -- persistence ----------------------------------------------------

    def save_head(self) -> None:
        self.head["count"] = len(self.records)
        text = json.dumps(self.head, sort_keys=True, indent=2) + "\n"
        (self.root / HEAD_NAME).write_text(text)

    def append_record(self, record: CandidateRecord) -> None:
        if record.id in self._by_id:
            raise ConfigError(f"duplicate candidate id {record.id!r}")
        with open(self.root / MANIFEST_NAME, "a") as f:
            f.write(_dumps(record.to_dict()) + "\n")
        self.records.append(record)
        self._by_id[record.id] = record

    @classmethod
    def create(cls, root: str | Path, head: dict) -> "CandidateCatalog":
        root = Path(root)
        (root / IMAGES_DIR).mkdir(parents=True, exist_ok=True)
        (root / MANIFEST_NAME).touch()
        catalog = cls(root, head, [])
        catalog.save_head()
        return catalog

    @classmethod
    def load(cls, root: str | Path) -> "CandidateCatalog":
        root = Path(root)
        head_path = root / HEAD_NAME
        manifest_path = root / MANIFEST_NAME
        if not head_path.exists() or not manifest_path.exists():
            raise NotFound(f"no catalog at {root}")
        head = json.loads(head_path.read_text())
        records = []
        with open(manifest_path) as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(CandidateRecord.from_dict(json.loads(line)))
                except (json.JSONDecodeError, TypeError) as exc:
                    raise IoError(
                        f"{manifest_path}:{lineno}: corrupt manifest line ({exc})"
                    ) from exc
        if head.get("count") != len(records):
            raise IoError(
                f"{manifest_path}: head says {head.get('count')} records, found {len(records)}"
            )
        return cls(root, head, records)

    # -- integrity ------------------------------------------------------

    def verify(
        self,
        full: bool = False,
        generator: Generator | None = None,
        sr_generator: SRGenerator | None = None,
    ) -> dict:
        """Check recorded hashes against the files; optionally regenerate.

        With full=True (and both models supplied) each record's latent is
        pushed back through the chain and the fresh PNG bytes must hash
        to the recorded values.
        """
        mismatches = []
        for record in self.records:
            for kind, rel, want in (
                ("lr", record.lr_path, record.lr_sha256),
                ("sr", record.sr_path, record.sr_sha256),
            ):
                path = self.root / rel
                if not path.exists():
                    mismatches.append({"id": record.id, "kind": kind, "reason": "missing"})
                elif sha256_file(path) != want:
                    mismatches.append({"id": record.id, "kind": kind, "reason": "hash"})
            if full and generator is not None and sr_generator is not None:
                z = record.latent_tensor().unsqueeze(0)
                lr = generate(generator, z)
                sr = upscale(sr_generator, lr)
                if sha256_bytes(png_bytes(lr[0])) != record.lr_sha256:
                    mismatches.append({"id": record.id, "kind": "lr", "reason": "regenerate"})
                if sha256_bytes(png_bytes(sr[0])) != record.sr_sha256:
                    mismatches.append({"id": record.id, "kind": "sr", "reason": "regenerate"})
        return {"checked": len(self.records), "mismatches": mismatches, "ok": not mismatches}


@dataclass
class GenerationModels:
    """The frozen pair of models a catalog's images are derived from."""

    generator: Generator
    sr_generator: SRGenerator
    gen_hash: str
    sr_hash: str
    latent_dim: int = field(init=False)

    def __post_init__(self) -> None:
        self.latent_dim = self.generator.config.latent_dim


def _load_ckpt(source: str | Path | ModelCheckpoint, kind: str) -> ModelCheckpoint:
    if isinstance(source, ModelCheckpoint):
        if source.kind != kind:
            raise CheckpointError(f"expected kind {kind!r}, got {source.kind!r}")
        if not source.content_hash:
            raise CheckpointError("checkpoint must be saved before use (no content hash)")
        return source
    path = Path(source)
    if not path.exists():
        raise CheckpointError(f"missing checkpoint: {path}")
    return load_checkpoint(path, expect_kind=kind)


def load_generation_models(
    gen_ckpt: str | Path | ModelCheckpoint, sr_ckpt: str | Path | ModelCheckpoint
) -> GenerationModels:
    gen = _load_ckpt(gen_ckpt, "synthesis")
    sr = _load_ckpt(sr_ckpt, "superres")
    return GenerationModels(
        generator=generator_from_checkpoint(gen),
        sr_generator=sr_generator_from_checkpoint(sr),
        gen_hash=gen.content_hash,
        sr_hash=sr.content_hash,
    )


def render_candidate(models: GenerationModels, latent: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
    """Run one latent through the full chain; returns (lr, sr) images."""
    lr = generate(models.generator, latent.reshape(1, -1))
    sr = upscale(models.sr_generator, lr)
    return lr[0], sr[0]


def append_candidates(
    catalog: CandidateCatalog,
    models: GenerationModels,
    latents: torch.Tensor,
    seed: int | None,
    created_at: str | None = None,
) -> list[CandidateRecord]:
    """Render latents and append one record each; ids continue the index."""
    created_at = created_at or CREATED_AT_DEFAULT
    new_records = []
    try:
        for row in latents:
            index = len(catalog.records)
            cid = f"c{index:06d}"
            lr, sr = render_candidate(models, row)
            lr_rel = f"{IMAGES_DIR}/{cid}_lr.png"
            sr_rel = f"{IMAGES_DIR}/{cid}_sr.png"
            save_image(lr, catalog.root / lr_rel)
            save_image(sr, catalog.root / sr_rel)
            record = CandidateRecord(
                id=cid,
                index=index,
                latent=[float(v) for v in row],
                seed=seed,
                lr_path=lr_rel,
                sr_path=sr_rel,
                lr_sha256=sha256_file(catalog.root / lr_rel),
                sr_sha256=sha256_file(catalog.root / sr_rel),
                gen_checkpoint_hash=models.gen_hash,
                sr_checkpoint_hash=models.sr_hash,
                created_at=created_at,
            )
            catalog.append_record(record)
            new_records.append(record)
    except OSError as exc:
        catalog.head["partial"] = True
        catalog.save_head()
        raise IoError(f"candidate generation interrupted by I/O failure: {exc}") from exc
    catalog.save_head()
    return new_records


def generate_candidates(
    gen_ckpt: str | Path | ModelCheckpoint,
    sr_ckpt: str | Path | ModelCheckpoint,
    count: int,
    seed: int,
    out_dir: str | Path,
    batch_size: int = 16,
    created_at: str | None = None,
) -> CandidateCatalog:
    """Generate `count` candidates through the full chain into `out_dir`.

    Latents come from sample_latent(count, seed); identical inputs yield
    byte-identical catalogs.
    """
    if count < 1:
        raise ConfigError("count must be >= 1")
    if batch_size < 1:
        raise ConfigError("batch_size must be >= 1")
    models = load_generation_models(gen_ckpt, sr_ckpt)
    gen_res = models.generator.config.output_resolution
    head = {
        "version": CATALOG_VERSION,
        "count": 0,
        "latent_dim": models.latent_dim,
        "lr_resolution": gen_res,
        "sr_resolution": gen_res * SCALE_FACTOR,
        "gen_checkpoint_hash": models.gen_hash,
        "sr_checkpoint_hash": models.sr_hash,
        "seed": seed,
        "created_at": created_at or CREATED_AT_DEFAULT,
    }
    catalog = CandidateCatalog.create(out_dir, head)
    latents = sample_latent(count, seed, models.latent_dim)
    for start in range(0, count, batch_size):
        append_candidates(
            catalog, models, latents[start : start + batch_size], seed, created_at
        )
    return catalog


def load_candidate_image(catalog: CandidateCatalog, candidate_id: str, kind: str) -> torch.Tensor:
    return load_image(catalog.image_path(candidate_id, kind))
