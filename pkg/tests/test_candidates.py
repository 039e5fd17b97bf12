"""Candidates module: latent navigation, catalog, grids, selections."""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

import numpy as np
import pytest
import torch

from chairstudio.candidates import (
    CandidateCatalog,
    SelectionEntry,
    SelectionStore,
    export_grid,
    generate_candidates,
    interpolate_latents,
    load_generation_models,
    neighborhood_samples,
    render_candidate,
    save_grid,
)
from chairstudio.errors import (
    CheckpointError,
    ConfigError,
    IoError,
    NotFound,
    RevisionConflict,
    ShapeError,
)
from chairstudio.imgio import save_image, sha256_file


# ----------------------------------------------------------- interpolation


def _vec(seed: int, scale: float = 0.8) -> torch.Tensor:
    g = torch.Generator().manual_seed(seed)
    return (torch.rand(100, generator=g) * 2 - 1) * scale


def test_interpolate_two_steps_is_endpoints():
    a, b = _vec(1), _vec(2)
    path = interpolate_latents(a, b, steps=2)
    assert len(path) == 2
    assert torch.equal(path[0], a)
    assert torch.equal(path[-1], b)


def test_interpolate_linear_midpoint_of_opposites_is_zero():
    a = _vec(3)
    path = interpolate_latents(a, -a, steps=3, mode="linear")
    assert torch.allclose(path[1], torch.zeros(100), atol=1e-7)


def test_interpolate_linear_affine_identity():
    a, b = _vec(4, 0.5), _vec(5, 0.5)
    path = interpolate_latents(a, b, steps=7, mode="linear")
    for t in range(7):
        assert torch.allclose(path[t] + path[6 - t], a + b, atol=1e-6)


def test_interpolate_spherical_preserves_norm():
    g = torch.Generator().manual_seed(6)
    for trial in range(5):
        a = (torch.rand(100, generator=g, dtype=torch.float64) * 2 - 1)
        b = (torch.rand(100, generator=g, dtype=torch.float64) * 2 - 1)
        # equalize norms, keep them small enough that clamping is inactive
        a = 0.05 * a / a.norm()
        b = 0.05 * b / b.norm()
        path = interpolate_latents(a, b, steps=9, mode="spherical")
        target = float(a.norm())
        for v in path:
            assert abs(float(v.norm()) - target) <= 1e-9
    # float32 inputs keep their dtype
    p32 = interpolate_latents(_vec(1), _vec(2), steps=3, mode="spherical")
    assert p32.dtype == torch.float32


def test_interpolate_validation():
    a, b = _vec(1), _vec(2)
    with pytest.raises(ConfigError):
        interpolate_latents(a, b, steps=1)
    with pytest.raises(ConfigError):
        interpolate_latents(a, b, steps=3, mode="bogus")
    with pytest.raises(ShapeError):
        interpolate_latents(a, torch.zeros(50), steps=3)


# ----------------------------------------------------------- neighborhoods


def test_neighborhood_within_radius_and_deterministic():
    center = _vec(7, 0.5)
    out = neighborhood_samples(center, radius=0.1, n=8, seed=3)
    assert out.shape == (8, 100)
    assert float((out - center).abs().max()) <= 0.1 + 1e-7
    assert torch.equal(out, neighborhood_samples(center, radius=0.1, n=8, seed=3))
    assert not torch.equal(out, neighborhood_samples(center, radius=0.1, n=8, seed=4))


def test_neighborhood_tiny_radius_approaches_center():
    center = _vec(8, 0.5)
    out = neighborhood_samples(center, radius=1e-9, n=4, seed=0)
    assert torch.allclose(out, center.expand(4, 100), atol=1e-8)


def test_neighborhood_clamps_to_cube():
    center = torch.ones(100)
    out = neighborhood_samples(center, radius=0.5, n=16, seed=1)
    assert float(out.max()) <= 1.0


def test_neighborhood_validation():
    with pytest.raises(ConfigError):
        neighborhood_samples(_vec(1), radius=0.0, n=4, seed=0)
    with pytest.raises(ConfigError):
        neighborhood_samples(_vec(1), radius=0.1, n=0, seed=0)


# ----------------------------------------------------------------- catalog


def test_generate_candidates_deterministic(tmp_path, gan_ckpt_path, sr_ckpt_path):
    cat1 = generate_candidates(gan_ckpt_path, sr_ckpt_path, count=6, seed=9, out_dir=tmp_path / "a")
    cat2 = generate_candidates(gan_ckpt_path, sr_ckpt_path, count=6, seed=9, out_dir=tmp_path / "b")
    m1 = (tmp_path / "a" / "catalog.jsonl").read_bytes()
    m2 = (tmp_path / "b" / "catalog.jsonl").read_bytes()
    assert m1 == m2
    for r1, r2 in zip(cat1.records, cat2.records):
        assert sha256_file(cat1.image_path(r1.id, "sr")) == sha256_file(cat2.image_path(r2.id, "sr"))
        assert sha256_file(cat1.image_path(r1.id, "lr")) == sha256_file(cat2.image_path(r2.id, "lr"))


def test_generate_candidates_short_final_batch(tmp_path, gan_ckpt_path, sr_ckpt_path):
    cat = generate_candidates(
        gan_ckpt_path, sr_ckpt_path, count=10, seed=2, out_dir=tmp_path, batch_size=4
    )
    assert len(cat.records) == 10
    assert [r.id for r in cat.records] == [f"c{i:06d}" for i in range(10)]


def test_candidate_dims_are_4x(tmp_path, catalog_dir):
    cat = CandidateCatalog.load(catalog_dir)
    from PIL import Image

    for rec in cat.records:
        with Image.open(cat.image_path(rec.id, "lr")) as lr:
            with Image.open(cat.image_path(rec.id, "sr")) as sr:
                assert sr.size == (lr.size[0] * 4, lr.size[1] * 4)
        assert len(rec.latent) == 100


def test_catalog_verify_and_regeneration(catalog_dir, gan_ckpt_path, sr_ckpt_path):
    cat = CandidateCatalog.load(catalog_dir)
    models = load_generation_models(gan_ckpt_path, sr_ckpt_path)
    report = cat.verify(full=True, generator=models.generator, sr_generator=models.sr_generator)
    assert report["ok"] is True
    assert report["mismatches"] == []
    # regeneration from stored latents is bit-exact
    rec = cat.records[0]
    lr, sr = render_candidate(models, rec.latent_tensor())
    from chairstudio.imgio import png_bytes

    assert hashlib.sha256(png_bytes(lr)).hexdigest() == rec.lr_sha256
    assert hashlib.sha256(png_bytes(sr)).hexdigest() == rec.sr_sha256


def test_catalog_detects_single_byte_corruption(tmp_path, gan_ckpt_path, sr_ckpt_path):
    cat = generate_candidates(gan_ckpt_path, sr_ckpt_path, count=3, seed=4, out_dir=tmp_path)
    victim = cat.image_path(cat.records[1].id, "sr")
    raw = bytearray(victim.read_bytes())
    raw[len(raw) // 2] ^= 0x01
    victim.write_bytes(bytes(raw))
    report = CandidateCatalog.load(tmp_path).verify()
    assert report["ok"] is False
    assert any(m["id"] == cat.records[1].id and m["kind"] == "sr" for m in report["mismatches"])


def test_catalog_load_errors(tmp_path, catalog_dir):
    with pytest.raises(NotFound):
        CandidateCatalog.load(tmp_path / "missing")
    # corrupt one manifest line -> IoError naming the line
    import shutil

    broken = tmp_path / "broken"
    shutil.copytree(catalog_dir, broken)
    lines = (broken / "catalog.jsonl").read_text().splitlines()
    lines[2] = lines[2][:-5] + "oops"
    (broken / "catalog.jsonl").write_text("\n".join(lines) + "\n")
    with pytest.raises(IoError, match=":3"):
        CandidateCatalog.load(broken)


def test_generate_candidates_missing_checkpoint(tmp_path, sr_ckpt_path):
    with pytest.raises(CheckpointError):
        generate_candidates(tmp_path / "nope.ckpt", sr_ckpt_path, count=2, seed=1, out_dir=tmp_path / "o")


def test_catalog_pagination(catalog_dir):
    cat = CandidateCatalog.load(catalog_dir)
    assert [r.id for r in cat.page(0, 3)] == [r.id for r in cat.records[:3]]
    assert [r.id for r in cat.page(6, 10)] == [r.id for r in cat.records[6:]]
    with pytest.raises(NotFound):
        cat.get("c999999")
    with pytest.raises(ConfigError):
        cat.image_path(cat.records[0].id, "weird")


# -------------------------------------------------------------------- grid


def _synthetic_catalog(root: Path, n: int, size: int) -> CandidateCatalog:
    """A catalog of hand-written images, no checkpoints involved."""
    cat = CandidateCatalog.create(root, head={"note": "fixture"})
    g = torch.Generator().manual_seed(0)
    for i in range(n):
        rid = f"c{i:06d}"
        lr = torch.rand(3, size // 4, size // 4, generator=g) * 2 - 1
        sr = torch.rand(3, size, size, generator=g) * 2 - 1
        lr_path = root / "images" / f"{rid}_lr.png"
        sr_path = root / "images" / f"{rid}_sr.png"
        lr_path.parent.mkdir(parents=True, exist_ok=True)
        save_image(lr, lr_path)
        save_image(sr, sr_path)
        from chairstudio.candidates.catalog import CandidateRecord

        cat.append_record(
            CandidateRecord(
                id=rid,
                index=i,
                latent=[0.0] * 100,
                seed=0,
                lr_path=f"images/{rid}_lr.png",
                sr_path=f"images/{rid}_sr.png",
                lr_sha256=sha256_file(lr_path),
                sr_sha256=sha256_file(sr_path),
                gen_checkpoint_hash="x",
                sr_checkpoint_hash="y",
                created_at="1970-01-01T00:00:00Z",
            )
        )
    cat.save_head()
    return cat


def test_grid_geometry_256(tmp_path):
    cat = _synthetic_catalog(tmp_path, 6, 256)
    ids = [r.id for r in cat.records]
    sheet = export_grid(cat, ids, columns=3)
    # width = columns*(256 + 2*pad) + pad with pad=4  ->  796
    assert sheet.shape == (2 * (256 + 8) + 4, 796, 3)


def test_grid_single_tile_is_image_plus_frame(tmp_path):
    cat = _synthetic_catalog(tmp_path, 1, 64)
    sheet = export_grid(cat, [cat.records[0].id], columns=1)
    # width = columns*(tile + 2*pad) + pad = 64 + 8 + 4 = 76
    assert sheet.shape == (76, 76, 3)
    from chairstudio.imgio import load_image, to_uint8

    inner = sheet[4:68, 4:68, :]
    expected = to_uint8(load_image(cat.image_path(cat.records[0].id, "sr")))
    assert np.array_equal(inner, expected)
    # frame is uniform background
    assert np.all(sheet[:4, :, :] == sheet[0, 0, 0])
    assert np.all(sheet[68:, :, :] == sheet[0, 0, 0])


def test_grid_row_major_and_errors(tmp_path):
    cat = _synthetic_catalog(tmp_path, 6, 32)
    ids = [r.id for r in cat.records]
    sheet = export_grid(cat, ids, columns=3)
    assert sheet.shape == (2 * (32 + 8) + 4, 3 * (32 + 8) + 4, 3)
    out = save_grid(cat, ids, 3, tmp_path / "grid.png")
    assert out.is_file()
    with pytest.raises(NotFound):
        export_grid(cat, ["missing"], columns=2)
    with pytest.raises(ConfigError):
        export_grid(cat, [], columns=2)
    with pytest.raises(ConfigError):
        export_grid(cat, ids, columns=0)


def test_grid_deterministic_bytes(tmp_path):
    cat = _synthetic_catalog(tmp_path, 4, 32)
    ids = [r.id for r in cat.records]
    p1 = save_grid(cat, ids, 2, tmp_path / "g1.png")
    p2 = save_grid(cat, ids, 2, tmp_path / "g2.png")
    assert p1.read_bytes() == p2.read_bytes()


# --------------------------------------------------------------- selections


def _store(tmp_path, ids=("c1", "c2", "c3")):
    return SelectionStore(tmp_path / "selections", known_ids=lambda i: i in ids)


def test_selection_revision_lifecycle(tmp_path):
    store = _store(tmp_path)
    empty = store.load("favs")
    assert empty.revision == 0 and empty.entries == {}
    s1 = store.mutate(
        "favs", expected_revision=0, set_entries={"c1": SelectionEntry(rating=5, note="nice")}
    )
    assert s1.revision == 1
    s2 = store.mutate("favs", expected_revision=1, remove_ids=["c1"])
    assert s2.revision == 2 and s2.entries == {}
    # persisted across a fresh store instance
    again = _store(tmp_path)
    assert again.load("favs").revision == 2


def test_selection_stale_revision_conflict(tmp_path):
    store = _store(tmp_path)
    store.mutate("s", expected_revision=0, set_entries={"c1": SelectionEntry(rating=3)})
    with pytest.raises(RevisionConflict) as exc:
        store.mutate("s", expected_revision=0, set_entries={"c2": SelectionEntry(rating=1)})
    assert exc.value.current_revision == 1
    assert store.load("s").entries.keys() == {"c1"}


def test_selection_unknown_id_leaves_store_unchanged(tmp_path):
    store = _store(tmp_path)
    store.mutate("s", expected_revision=0, set_entries={"c1": SelectionEntry(rating=3)})
    with pytest.raises(NotFound):
        store.mutate("s", expected_revision=1, set_entries={"zzz": SelectionEntry(rating=1)})
    after = store.load("s")
    assert after.revision == 1
    assert after.entries.keys() == {"c1"}


def test_selection_concurrent_mutations_one_wins(tmp_path):
    store = _store(tmp_path)
    results: list[str] = []
    barrier = threading.Barrier(2)

    def attempt(cid: str):
        barrier.wait()
        try:
            store.mutate("race", expected_revision=0, set_entries={cid: SelectionEntry(rating=2)})
            results.append("ok")
        except RevisionConflict:
            results.append("conflict")

    threads = [threading.Thread(target=attempt, args=(c,)) for c in ("c1", "c2")]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(results) == ["conflict", "ok"]
    assert store.load("race").revision == 1


def test_selection_entry_validation(tmp_path):
    with pytest.raises(ConfigError):
        SelectionEntry(rating=6)
    with pytest.raises(ConfigError):
        SelectionEntry(rating=-1)
    store = _store(tmp_path)
    with pytest.raises(ConfigError):
        store.mutate("bad name!", expected_revision=0)


def test_selection_file_is_json_document(tmp_path):
    store = _store(tmp_path)
    store.mutate("doc", expected_revision=0, set_entries={"c2": SelectionEntry(rating=4, note="n")})
    payload = json.loads((tmp_path / "selections" / "doc.json").read_text())
    assert payload["name"] == "doc"
    assert payload["revision"] == 1
    assert payload["entries"]["c2"]["rating"] == 4
