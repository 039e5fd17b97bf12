"""Superres module: upscaling, perceptual loss, PSNR, two-phase fine-tuning."""

from __future__ import annotations

import dataclasses
import math

import pytest
import torch

from chairstudio.ckpt import load_checkpoint
from chairstudio.errors import EmptyDataset, ShapeError, TrainingDiverged
from chairstudio.superres import (
    SR_HISTORY_COLUMNS,
    RandomConvFeatureExtractor,
    SRGeneratorConfig,
    bicubic_upscale,
    build_sr_generator,
    evaluate_sr,
    extractor_from_spec,
    finetune_sr,
    init_sr_state,
    nearest_upscale,
    perceptual_content_loss,
    psnr,
    sr_generator_from_checkpoint,
    sr_losses,
    sr_state_to_checkpoint,
    sr_train_step,
    upscale,
)

from conftest import random_pairs, tiny_sr_config


def _extractor(cfg):
    return extractor_from_spec(cfg.extractor_spec())


# --------------------------------------------------------------- upscale


def test_upscale_shapes_and_determinism():
    gen = build_sr_generator(SRGeneratorConfig(features=4, blocks=1), seed=0)
    lr = torch.rand(2, 3, 16, 16) * 2 - 1
    sr = upscale(gen, lr)
    assert sr.shape == (2, 3, 64, 64)
    assert float(sr.min()) >= -1.0 and float(sr.max()) <= 1.0
    assert torch.equal(sr, upscale(gen, lr))
    # batch equivalence with per-item application
    singles = torch.cat([upscale(gen, lr[:1]), upscale(gen, lr[1:])])
    assert torch.equal(sr, singles)
    with pytest.raises(ShapeError):
        upscale(gen, torch.zeros(3, 16, 16))


def test_upscale_64_to_256():
    gen = build_sr_generator(SRGeneratorConfig(features=4, blocks=1), seed=0)
    out = upscale(gen, torch.rand(1, 3, 64, 64) * 2 - 1)
    assert out.shape == (1, 3, 256, 256)


def test_fresh_generator_equals_bicubic():
    # the residual trunk's final conv is zero-initialized, so an untrained
    # generator reproduces its bicubic skip connection
    gen = build_sr_generator(SRGeneratorConfig(features=4, blocks=1), seed=0)
    lr = torch.rand(1, 3, 16, 16) * 2 - 1
    assert torch.allclose(upscale(gen, lr), bicubic_upscale(lr), atol=1e-6)


# ------------------------------------------------------- perceptual loss


def test_perceptual_loss_identical_is_zero():
    a = torch.rand(2, 4, 4)
    assert float(perceptual_content_loss(a, a)) == 0.0


def test_perceptual_loss_2x2_hand_oracle():
    phi_hr = torch.zeros(1, 2, 2, dtype=torch.float64)
    phi_sr = torch.tensor([[[1.0, 2.0], [3.0, 4.0]]], dtype=torch.float64)
    # (1 + 4 + 9 + 16) / 4 = 7.5, normalized by spatial size only
    assert float(perceptual_content_loss(phi_hr, phi_sr)) == 7.5


@pytest.mark.parametrize("shape", [(1, 3, 5), (4, 2, 2), (8, 8, 8)])
def test_perceptual_loss_constant_offset(shape):
    c = 0.371
    base = torch.rand(*shape, dtype=torch.float64)
    loss = perceptual_content_loss(base, base + c)
    assert abs(float(loss) - shape[0] * c * c) <= 1e-9 * shape[0]


def test_perceptual_loss_brute_force_oracle():
    g = torch.Generator().manual_seed(5)
    for _ in range(20):
        ch = int(torch.randint(1, 9, (1,), generator=g))
        h = int(torch.randint(1, 9, (1,), generator=g))
        w = int(torch.randint(1, 9, (1,), generator=g))
        a = torch.rand(ch, h, w, generator=g, dtype=torch.float64)
        b = torch.rand(ch, h, w, generator=g, dtype=torch.float64)
        total = 0.0
        for k in range(ch):
            for y in range(h):
                for x in range(w):
                    total += (float(a[k, y, x]) - float(b[k, y, x])) ** 2
        expected = total / (h * w)
        got = float(perceptual_content_loss(a, b))
        assert abs(got - expected) <= 1e-6 * max(1.0, abs(expected))


def test_perceptual_loss_shape_mismatch():
    with pytest.raises(ShapeError):
        perceptual_content_loss(torch.zeros(1, 2, 2), torch.zeros(1, 2, 3))


# --------------------------------------------------------------- sr_losses


def test_sr_losses_weight_zero_is_content_exactly():
    content = torch.tensor(7.5, dtype=torch.float64)
    _, loss_g = sr_losses(
        torch.tensor([0.9]), torch.tensor([0.1]), content, adversarial_weight=0.0
    )
    assert float(loss_g) == 7.5


def test_sr_losses_equilibrium():
    half = torch.full((4,), 0.5, dtype=torch.float64)
    loss_d, _ = sr_losses(half, half, torch.tensor(0.0, dtype=torch.float64))
    assert abs(float(loss_d) - 2.0 * math.log(2.0)) <= 1e-12


def test_sr_losses_hand_oracle():
    loss_d, loss_g = sr_losses(
        torch.tensor([0.5], dtype=torch.float64),
        torch.tensor([0.25], dtype=torch.float64),
        torch.tensor(7.5, dtype=torch.float64),
        adversarial_weight=1e-3,
    )
    assert abs(float(loss_g) - (7.5 + 1e-3 * math.log(4.0))) <= 1e-12
    assert round(float(loss_g), 5) == 7.50139
    with pytest.raises(EmptyDataset):
        sr_losses(torch.tensor([]), torch.tensor([]), torch.tensor(0.0))


# ------------------------------------------------------------------ psnr


def test_psnr_identical_is_infinite():
    a = torch.rand(3, 8, 8) * 2 - 1
    assert psnr(a, a) == math.inf


def test_psnr_zero_db_and_hand_oracle():
    # constant -1 and +1 map to 0 and 1 on the [0,1] scale: MSE 1 -> 0 dB
    a = torch.full((3, 4, 4), -1.0)
    b = torch.full((3, 4, 4), 1.0)
    assert abs(psnr(a, b)) <= 1e-9
    # 0 vs 0.5 on the [0,1] scale: MSE 0.25 -> 10*log10(4) = 6.0206 dB
    c = torch.full((3, 4, 4), -1.0)
    d = torch.full((3, 4, 4), 0.0)
    assert round(psnr(c, d), 4) == 6.0206
    with pytest.raises(ShapeError):
        psnr(a, torch.zeros(3, 4, 5))


# ------------------------------------------------------ feature extractor


def test_extractor_frozen_and_deterministic():
    e1 = RandomConvFeatureExtractor(layer=(2, 1), channels=4, seed=0)
    e2 = RandomConvFeatureExtractor(layer=(2, 1), channels=4, seed=0)
    assert e1.params_hash() == e2.params_hash()
    assert all(not p.requires_grad for p in e1.parameters())
    x = torch.rand(1, 3, 16, 16) * 2 - 1
    assert torch.equal(e1.extract(x), e2.extract(x))
    e3 = RandomConvFeatureExtractor(layer=(2, 1), channels=4, seed=1)
    assert e3.params_hash() != e1.params_hash()


def test_extractor_output_shape_depends_only_on_input_and_layer():
    ext = RandomConvFeatureExtractor(layer=(2, 1), channels=4, seed=0)
    a = ext.extract(torch.rand(1, 3, 16, 16))
    b = ext.extract(torch.rand(1, 3, 16, 16))
    assert a.shape == b.shape
    # one pooling stage before block 2 halves the spatial dims
    assert a.shape[-2:] == (8, 8)
    c = ext.extract(torch.rand(1, 3, 32, 32))
    assert c.shape[-2:] == (16, 16)


def test_extractor_params_frozen_through_training():
    cfg = tiny_sr_config(content_only_steps=2, adversarial_steps=1)
    ext = _extractor(cfg)
    before = ext.params_hash()
    state = init_sr_state(cfg, seed=0)
    pairs = random_pairs(2, 32, seed=1)
    hr = torch.stack([p.hr for p in pairs])
    lr = torch.stack([p.lr for p in pairs])
    for _ in range(3):
        state, _ = sr_train_step(state, hr, lr, ext)
    assert ext.params_hash() == before


# ------------------------------------------------------------ fine-tuning


def test_finetune_zero_phases_equals_initialization(tmp_path):
    cfg = tiny_sr_config(content_only_steps=0, adversarial_steps=0)
    pairs = random_pairs(2, 32, seed=1)
    ckpt = finetune_sr(pairs, cfg, seed=3, checkpoint_dir=tmp_path)
    init = sr_state_to_checkpoint(init_sr_state(cfg, seed=3), 3, _extractor(cfg))
    assert set(ckpt.tensors) == set(init.tensors)
    for k in ckpt.tensors:
        assert torch.equal(ckpt.tensors[k], init.tensors[k]), k


def test_finetune_deterministic_per_seed(tmp_path):
    cfg = tiny_sr_config(content_only_steps=2, adversarial_steps=2)
    pairs = random_pairs(3, 32, seed=1)
    c1 = finetune_sr(pairs, cfg, seed=3, checkpoint_dir=tmp_path / "a")
    c2 = finetune_sr(pairs, cfg, seed=3, checkpoint_dir=tmp_path / "b")
    assert c1.content_hash == c2.content_hash
    assert (tmp_path / "a" / "final.ckpt").read_bytes() == (
        tmp_path / "b" / "final.ckpt"
    ).read_bytes()


def test_phase_transition_exactly_once(tmp_path):
    cfg = tiny_sr_config(content_only_steps=3, adversarial_steps=2)
    pairs = random_pairs(2, 32, seed=1)
    ckpt = finetune_sr(pairs, cfg, seed=3, checkpoint_dir=tmp_path)
    hist = ckpt.tensors["history/losses"]
    assert hist.shape[0] == 5
    # content-phase rows have no discriminator stats (stored as NaN); the
    # flag flips exactly once and never flips back
    cols = list(SR_HISTORY_COLUMNS)
    d_col = cols.index("mean_d_hr") - 1  # history tensor has no step column
    is_adv = [bool(torch.isfinite(row[d_col])) for row in hist]
    assert is_adv == [False, False, False, True, True]


def test_weight_zero_adversarial_phase_matches_content_only(tmp_path):
    base = tiny_sr_config(content_only_steps=2, adversarial_steps=3)
    w0 = dataclasses.replace(base, adversarial_weight=0.0)
    content_only = dataclasses.replace(base, content_only_steps=5, adversarial_steps=0)
    pairs = random_pairs(3, 32, seed=2)
    ck_w0 = finetune_sr(pairs, w0, seed=5, checkpoint_dir=tmp_path / "w0")
    ck_co = finetune_sr(pairs, content_only, seed=5, checkpoint_dir=tmp_path / "co")
    gen_keys = [k for k in ck_w0.tensors if k.startswith("gen/")]
    assert gen_keys
    for k in gen_keys:
        assert torch.equal(ck_w0.tensors[k], ck_co.tensors[k]), k


def test_sr_train_step_divergence_rolls_back():
    cfg = tiny_sr_config(content_only_steps=3, adversarial_steps=0, batch_size=1)
    state = init_sr_state(cfg, seed=0)
    ext = _extractor(cfg)
    good = random_pairs(1, 32, seed=1)
    state, _ = sr_train_step(state, good[0].hr.unsqueeze(0), good[0].lr.unsqueeze(0), ext)
    params_before = [p.clone() for p in state.generator.parameters()]
    step_before = state.step
    bad_hr = good[0].hr.clone()
    bad_hr[0, 0, 0] = float("nan")
    with pytest.raises(TrainingDiverged):
        sr_train_step(state, bad_hr.unsqueeze(0), good[0].lr.unsqueeze(0), ext)
    assert state.step == step_before
    for a, b in zip(params_before, state.generator.parameters()):
        assert torch.equal(a, b)


def test_finetune_divergence_returns_last_good(tmp_path):
    cfg = tiny_sr_config(content_only_steps=3, adversarial_steps=0, batch_size=2)
    pairs = random_pairs(2, 32, seed=1)
    pairs[1].hr[0, 0, 0] = float("nan")
    ckpt = finetune_sr(pairs, cfg, seed=3, checkpoint_dir=tmp_path)
    # the run halts at the first bad step and persists the last good state
    assert ckpt.meta["diverged"] is True
    assert ckpt.meta["step"] == 0
    saved = load_checkpoint(tmp_path / "final.ckpt", expect_kind="superres")
    assert saved.content_hash == ckpt.content_hash


# -------------------------------------------------------------- evaluation


def test_evaluate_sr_stub_equals_nearest_baseline():
    pairs = random_pairs(3, 32, seed=4)
    report = evaluate_sr(lambda lr: nearest_upscale(lr, 4), pairs)
    assert report["count"] == 3
    assert len(report["pairs"]) == 3
    for row in report["pairs"]:
        assert row["psnr_model"] == row["psnr_nearest"]
    assert report["mean"]["psnr_model"] == report["mean"]["psnr_nearest"]


def test_bicubic_beats_nearest_on_smooth_images(tmp_path):
    from chairstudio.dataset import downscale, preprocess, synth_chair_corpus
    from chairstudio.dataset.pairs import ResolutionPair

    man = synth_chair_corpus(6, 64, seed=8, out_dir=tmp_path / "c")
    pairs = []
    for r in man.records:
        hr = preprocess(man.resolve(r), 64)
        pairs.append(ResolutionPair(hr=hr, lr=downscale(hr, 4), source_id=r.id))
    report = evaluate_sr(lambda lr: nearest_upscale(lr, 4), pairs)
    assert report["mean"]["psnr_bicubic"] >= report["mean"]["psnr_nearest"]


def test_evaluate_sr_real_generator_and_empty():
    gen = build_sr_generator(SRGeneratorConfig(features=4, blocks=1), seed=0)
    pairs = random_pairs(2, 32, seed=4)
    report = evaluate_sr(gen, pairs)
    assert report["count"] == 2
    with pytest.raises(EmptyDataset):
        evaluate_sr(gen, [])


def test_sr_checkpoint_roundtrip_inference(tmp_path):
    cfg = tiny_sr_config(content_only_steps=1, adversarial_steps=1)
    pairs = random_pairs(2, 32, seed=1)
    ckpt = finetune_sr(pairs, cfg, seed=3, checkpoint_dir=tmp_path)
    gen = sr_generator_from_checkpoint(load_checkpoint(tmp_path / "final.ckpt"))
    lr = torch.rand(1, 3, 8, 8) * 2 - 1
    out = upscale(gen, lr)
    assert out.shape == (1, 3, 32, 32)
