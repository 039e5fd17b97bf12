"""HTTP service for browsing, on-demand generation, and selections.

Reads are unrestricted; model inference runs behind a single lock (one
checkpoint pair, bounded memory), and selection writes are serialized
per set with optimistic revision checks. Catalog images and checkpoints
are never mutated — generation only appends new records or writes
preview files in a scratch area.
"""

from __future__ import annotations

import io
import json
import threading
from pathlib import Path

import torch
from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse, Response
from PIL import Image
from pydantic import BaseModel, Field

from ..candidates.catalog import (
    CandidateCatalog,
    CandidateRecord,
    GenerationModels,
    append_candidates,
    load_generation_models,
)
from ..candidates.grid import export_grid
from ..candidates.latent import MODES, interpolate_latents, neighborhood_samples
from ..candidates.selections import SelectionEntry, SelectionStore
from ..errors import (
    ChairStudioError,
    CheckpointError,
    ConfigError,
    IoError,
    NotFound,
    RevisionConflict,
    ShapeError,
)
from ..imgio import save_image, sha256_bytes
from ..superres.models import upscale
from ..synthesis.losses import sample_latent
from ..synthesis.models import generate

MAX_PREVIEW_BATCH = 16
MAX_GENERATE_BATCH = 256
PREVIEWS_DIR = "previews"


class GenerateBody(BaseModel):
    count: int = Field(ge=1, le=MAX_GENERATE_BATCH)
    seed: int


class InterpolateBody(BaseModel):
    from_id: str
    to_id: str
    steps: int = Field(ge=2, le=MAX_PREVIEW_BATCH)
    mode: str = "linear"


class NeighborhoodBody(BaseModel):
    id: str
    radius: float = Field(gt=0.0)
    n: int = Field(ge=1, le=MAX_PREVIEW_BATCH)
    seed: int = 0


class PromoteBody(BaseModel):
    latent: list[float] = Field(min_length=1, max_length=4096)


class SheetBody(BaseModel):
    ids: list[str] = Field(min_length=1, max_length=64)
    columns: int = Field(default=4, ge=1, le=16)


class SelectionEntryBody(BaseModel):
    rating: int = Field(ge=0, le=5, default=0)
    note: str = ""


class SelectionMutation(BaseModel):
    expected_revision: int = Field(ge=0)
    set: dict[str, SelectionEntryBody] = Field(default_factory=dict)
    remove: list[str] = Field(default_factory=list)


def _record_summary(record: CandidateRecord) -> dict:
    return {
        "id": record.id,
        "index": record.index,
        "seed": record.seed,
        "created_at": record.created_at,
        "lr_url": f"/candidates/{record.id}/image?kind=lr",
        "sr_url": f"/candidates/{record.id}/image?kind=sr",
    }


def _record_detail(record: CandidateRecord) -> dict:
    detail = _record_summary(record)
    detail.update(
        {
            "latent": record.latent,
            "lr_sha256": record.lr_sha256,
            "sr_sha256": record.sr_sha256,
            "gen_checkpoint_hash": record.gen_checkpoint_hash,
            "sr_checkpoint_hash": record.sr_checkpoint_hash,
        }
    )
    return detail


def create_service(
    catalog_dir: str | Path,
    gen_ckpt: str | Path | None = None,
    sr_ckpt: str | Path | None = None,
    selections_dir: str | Path | None = None,
) -> FastAPI:
    """Build the app around one catalog and (optionally) its checkpoints.

    Without checkpoints the browsing and selection endpoints still work;
    generation endpoints answer 503-style errors.
    """
    catalog = CandidateCatalog.load(catalog_dir)
    selections_dir = Path(selections_dir) if selections_dir else catalog.root.parent / "selections"
    store = SelectionStore(selections_dir, known_ids=lambda cid: cid in catalog)
    previews_root = catalog.root / PREVIEWS_DIR

    models: GenerationModels | None = None
    if gen_ckpt is not None and sr_ckpt is not None:
        models = load_generation_models(gen_ckpt, sr_ckpt)

    inference_lock = threading.Lock()
    catalog_lock = threading.Lock()

    app = FastAPI(title="chairstudio gateway", version="1.0")

    def _require_models() -> GenerationModels:
        if models is None:
            raise CheckpointError("service started without checkpoints; generation disabled")
        return models

    # -- error mapping --------------------------------------------------

    def _error(status: int, code: str, message: str, **extra) -> JSONResponse:
        return JSONResponse(status_code=status, content={"code": code, "message": message, **extra})

    @app.exception_handler(NotFound)
    async def _nf(_: Request, exc: NotFound):
        return _error(404, "not_found", str(exc))

    @app.exception_handler(RevisionConflict)
    async def _rc(_: Request, exc: RevisionConflict):
        return _error(409, "revision_conflict", str(exc), current_revision=exc.current_revision)

    @app.exception_handler(ConfigError)
    async def _cfg(_: Request, exc: ConfigError):
        return _error(400, "bad_request", str(exc))

    @app.exception_handler(ShapeError)
    async def _shape(_: Request, exc: ShapeError):
        return _error(400, "bad_request", str(exc))

    @app.exception_handler(CheckpointError)
    async def _ckpt(_: Request, exc: CheckpointError):
        return _error(503, "generation_unavailable", str(exc))

    @app.exception_handler(IoError)
    async def _io(_: Request, exc: IoError):
        return _error(500, "io_error", str(exc))

    @app.exception_handler(ChairStudioError)
    async def _generic(_: Request, exc: ChairStudioError):
        return _error(500, "internal_error", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation(_: Request, exc: RequestValidationError):
        return _error(422, "invalid_request", str(exc.errors()[:3]))

    # -- read endpoints --------------------------------------------------

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "candidates": len(catalog),
            "generation_enabled": models is not None,
        }

    @app.get("/candidates")
    def list_candidates(
        offset: int = Query(default=0, ge=0),
        limit: int = Query(default=50, ge=0, le=500),
    ) -> dict:
        items = catalog.page(offset, limit)
        return {
            "total": len(catalog),
            "offset": offset,
            "limit": limit,
            "items": [_record_summary(r) for r in items],
        }

    @app.get("/candidates/{candidate_id}")
    def get_candidate(candidate_id: str) -> dict:
        return _record_detail(catalog.get(candidate_id))

    @app.get("/candidates/{candidate_id}/image")
    def get_candidate_image(candidate_id: str, kind: str = Query(default="sr")):
        path = catalog.image_path(candidate_id, kind)
        if not path.exists():
            raise NotFound(f"image file for {candidate_id!r} ({kind}) is missing")
        return FileResponse(path, media_type="image/png")

    # -- generation endpoints ---------------------------------------------

    @app.post("/generate")
    def generate_more(body: GenerateBody) -> dict:
        m = _require_models()
        latents = sample_latent(body.count, body.seed, m.latent_dim)
        with inference_lock, catalog_lock:
            records = append_candidates(catalog, m, latents, body.seed)
        return {"items": [_record_detail(r) for r in records], "total": len(catalog)}

    @app.post("/promote")
    def promote(body: PromoteBody) -> dict:
        m = _require_models()
        if len(body.latent) != m.latent_dim:
            raise ConfigError(
                f"latent must have {m.latent_dim} values, got {len(body.latent)}"
            )
        z = torch.tensor(body.latent, dtype=torch.float32).reshape(1, -1)
        with inference_lock, catalog_lock:
            records = append_candidates(catalog, m, z, seed=None)
        return _record_detail(records[0])

    @app.post("/sheets")
    def export_sheet(body: SheetBody):
        sheet = export_grid(catalog, body.ids, body.columns)
        buf = io.BytesIO()
        Image.fromarray(sheet).save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    def _render_previews(token: str, latents) -> list[dict]:
        m = _require_models()
        out_dir = previews_root / token
        items = []
        with inference_lock:
            for i, z in enumerate(latents):
                lr_path = out_dir / f"{i:03d}_lr.png"
                sr_path = out_dir / f"{i:03d}_sr.png"
                if not (lr_path.exists() and sr_path.exists()):
                    out_dir.mkdir(parents=True, exist_ok=True)
                    lr = generate(m.generator, z.reshape(1, -1))
                    sr = upscale(m.sr_generator, lr)
                    save_image(lr[0], lr_path)
                    save_image(sr[0], sr_path)
                items.append(
                    {
                        "index": i,
                        "latent": [float(v) for v in z],
                        "lr_url": f"/{PREVIEWS_DIR}/{token}/{i:03d}_lr.png",
                        "sr_url": f"/{PREVIEWS_DIR}/{token}/{i:03d}_sr.png",
                    }
                )
        return items

    @app.post("/interpolate")
    def interpolate(body: InterpolateBody) -> dict:
        if body.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {body.mode!r}")
        a = catalog.get(body.from_id).latent_tensor()
        b = catalog.get(body.to_id).latent_tensor()
        path = interpolate_latents(a, b, body.steps, body.mode)
        token = "i" + sha256_bytes(
            json.dumps(
                [body.from_id, body.to_id, body.steps, body.mode], separators=(",", ":")
            ).encode()
        )[:16]
        return {"token": token, "items": _render_previews(token, path)}

    @app.post("/neighborhood")
    def neighborhood(body: NeighborhoodBody) -> dict:
        center = catalog.get(body.id).latent_tensor()
        samples = neighborhood_samples(center, body.radius, body.n, body.seed)
        token = "n" + sha256_bytes(
            json.dumps(
                [body.id, repr(body.radius), body.n, body.seed], separators=(",", ":")
            ).encode()
        )[:16]
        return {"token": token, "items": _render_previews(token, samples)}

    @app.get(f"/{PREVIEWS_DIR}/{{token}}/{{name}}")
    def get_preview(token: str, name: str):
        path = (previews_root / token / name).resolve()
        if previews_root.resolve() not in path.parents or not path.exists():
            raise NotFound(f"no preview {token}/{name}")
        return FileResponse(path, media_type="image/png")

    # -- selections ---------------------------------------------------------

    @app.get("/selections")
    def list_selections() -> dict:
        return {"names": store.list_names()}

    @app.get("/selections/{name}")
    def get_selection(name: str) -> dict:
        return store.load(name).to_dict()

    @app.post("/selections/{name}")
    def mutate_selection(name: str, body: SelectionMutation) -> dict:
        entries = {
            cid: SelectionEntry(rating=e.rating, note=e.note) for cid, e in body.set.items()
        }
        updated = store.mutate(
            name,
            expected_revision=body.expected_revision,
            set_entries=entries,
            remove_ids=body.remove,
        )
        return updated.to_dict()

    return app


def serve(
    catalog_dir: str | Path,
    gen_ckpt: str | Path | None,
    sr_ckpt: str | Path | None,
    selections_dir: str | Path | None,
    host: str = "127.0.0.1",
    port: int = 8000,
) -> None:
    """Run the service until interrupted."""
    import uvicorn

    app = create_service(catalog_dir, gen_ckpt, sr_ckpt, selections_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
