"""Checkpoint container format and PNG round-trip helpers."""

from __future__ import annotations

import pytest
import torch

from chairstudio.ckpt import ModelCheckpoint, load_checkpoint
from chairstudio.errors import CheckpointError
from chairstudio.imgio import (
    load_image,
    png_bytes,
    save_image,
    sha256_bytes,
    to_normalized,
    to_uint8,
    validate_normalized,
)


def _sample_ckpt() -> ModelCheckpoint:
    g = torch.Generator().manual_seed(0)
    return ModelCheckpoint(
        kind="synthesis",
        config={"a": 1, "nested": {"b": [1, 2, 3]}},
        meta={"step": 7},
        tensors={
            "gen/w": torch.rand(4, 3, generator=g),
            "gen/b": torch.rand(4, generator=g).double(),
            "rng/noise": torch.randint(0, 255, (16,), generator=g, dtype=torch.uint8),
            "optg/w/step": torch.tensor(3, dtype=torch.int64),
        },
    )


def test_save_load_save_byte_identical(tmp_path):
    ck = _sample_ckpt()
    p1 = tmp_path / "a.ckpt"
    p2 = tmp_path / "b.ckpt"
    h1 = ck.save(p1)
    loaded = load_checkpoint(p1)
    h2 = loaded.save(p2)
    assert h1 == h2
    assert p1.read_bytes() == p2.read_bytes()
    for k, v in ck.tensors.items():
        assert torch.equal(loaded.tensors[k], v)
        assert loaded.tensors[k].dtype == v.dtype
    assert loaded.config == ck.config
    assert loaded.meta == ck.meta


def test_checkpoint_corruption_detected(tmp_path):
    ck = _sample_ckpt()
    p = tmp_path / "a.ckpt"
    ck.save(p)
    raw = bytearray(p.read_bytes())
    raw[len(raw) // 2] ^= 0xFF
    p.write_bytes(bytes(raw))
    with pytest.raises(CheckpointError):
        load_checkpoint(p)


def test_checkpoint_kind_and_missing(tmp_path):
    ck = _sample_ckpt()
    p = tmp_path / "a.ckpt"
    ck.save(p)
    with pytest.raises(CheckpointError):
        load_checkpoint(p, expect_kind="superres")
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "missing.ckpt")


def test_checkpoint_hash_tracks_content(tmp_path):
    ck = _sample_ckpt()
    h1 = ck.save(tmp_path / "a.ckpt")
    ck2 = _sample_ckpt()
    ck2.tensors["gen/w"] = ck2.tensors["gen/w"] + 1.0
    h2 = ck2.save(tmp_path / "b.ckpt")
    assert h1 != h2


def test_image_png_roundtrip_exact(tmp_path):
    g = torch.Generator().manual_seed(1)
    # quantize to the uint8 grid first so the round trip is exact
    img = to_normalized(to_uint8(torch.rand(3, 9, 7, generator=g) * 2 - 1))
    path = tmp_path / "img.png"
    save_image(img, path)
    back = load_image(path)
    assert torch.equal(back, img)
    assert png_bytes(img) == path.read_bytes()
    assert sha256_bytes(png_bytes(img)) == sha256_bytes(path.read_bytes())


def test_validate_normalized_rejects_bad_values():
    validate_normalized(torch.zeros(3, 4, 4))
    with pytest.raises(Exception):
        validate_normalized(torch.full((3, 4, 4), 2.0))
    with pytest.raises(Exception):
        validate_normalized(torch.full((3, 4, 4), float("nan")))
