"""Shared fixtures: tiny corpora, checkpoints, and a populated catalog.

Everything here is deliberately small (16x16 synthesis, 64x64 sr) so the
unit-test suite stays fast; the acceptance module builds its own larger
artifacts where a criterion demands them.
"""

from __future__ import annotations

import pytest
import torch

torch.set_num_threads(1)

from chairstudio.candidates import generate_candidates
from chairstudio.dataset import (
    PairSet,
    ResolutionPair,
    downscale,
    synth_chair_corpus,
)
from chairstudio.superres import (
    SRDiscriminatorConfig,
    SRGeneratorConfig,
    SRTrainConfig,
    finetune_sr,
)
from chairstudio.synthesis import (
    DiscriminatorConfig,
    GeneratorConfig,
    SynthesisTrainConfig,
    TrainHyper,
    train_synthesis,
)

TINY_RES = 16  # synthesis resolution used by the shared checkpoints
TINY_SR_RES = TINY_RES * 4

# Verdict lines recorded by tests/test_acceptance.py; echoed after the run so
# they are visible even when pytest captures stdout.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def tiny_gan_config(batch_size: int = 4, epochs: int = 1) -> SynthesisTrainConfig:
    return SynthesisTrainConfig(
        generator=GeneratorConfig(
            latent_dim=100, stages=2, base_channels=8, output_resolution=TINY_RES
        ),
        discriminator=DiscriminatorConfig(
            stages=2, base_channels=8, input_resolution=TINY_RES
        ),
        hyper=TrainHyper(),
        epochs=epochs,
        batch_size=batch_size,
    )


def tiny_sr_config(
    content_only_steps: int = 2, adversarial_steps: int = 2, batch_size: int = 2
) -> SRTrainConfig:
    return SRTrainConfig(
        generator=SRGeneratorConfig(features=4, blocks=1),
        discriminator=SRDiscriminatorConfig(base_channels=4, stages=2),
        content_only_steps=content_only_steps,
        adversarial_steps=adversarial_steps,
        batch_size=batch_size,
        content_layer=(2, 1),
        extractor={"kind": "random_conv", "layer": [2, 1], "channels": 4, "seed": 0},
    )


def random_pairs(n: int, hr_res: int, seed: int) -> PairSet:
    g = torch.Generator().manual_seed(seed)
    pairs = []
    for i in range(n):
        hr = torch.rand(3, hr_res, hr_res, generator=g) * 2.0 - 1.0
        pairs.append(ResolutionPair(hr=hr, lr=downscale(hr, 4), source_id=f"r{i}"))
    return PairSet(pairs)


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """12 procedural chairs at 16x16 plus their ingested manifest."""
    root = tmp_path_factory.mktemp("corpus16")
    manifest = synth_chair_corpus(12, TINY_RES, seed=3, out_dir=root)
    return manifest


@pytest.fixture(scope="session")
def gan_ckpt_path(tmp_path_factory, corpus):
    """A briefly trained 16x16 GAN checkpoint on disk."""
    out = tmp_path_factory.mktemp("gan16")
    train_synthesis(corpus, tiny_gan_config(), seed=5, checkpoint_dir=out)
    return out / "final.ckpt"


@pytest.fixture(scope="session")
def sr_ckpt_path(tmp_path_factory):
    """A briefly trained x4 SR checkpoint (64 -> for 16x16 lr inputs)."""
    out = tmp_path_factory.mktemp("sr64")
    pairs = PairSet(
        [
            ResolutionPair(
                hr=(hr := preprocess_free_chair(i)), lr=downscale(hr, 4), source_id=f"s{i}"
            )
            for i in range(3)
        ]
    )
    finetune_sr(pairs, tiny_sr_config(), seed=6, checkpoint_dir=out)
    return out / "final.ckpt"


_CHAIR_CACHE: dict[int, torch.Tensor] = {}


def preprocess_free_chair(i: int) -> torch.Tensor:
    """A deterministic 64x64 chair tensor without touching the filesystem."""
    if i not in _CHAIR_CACHE:
        import numpy as np

        from chairstudio.dataset import draw_chair, sample_chair_params
        from chairstudio.imgio import to_normalized

        rng = np.random.default_rng([77, i])
        _CHAIR_CACHE[i] = to_normalized(draw_chair(sample_chair_params(TINY_SR_RES, rng)))
    return _CHAIR_CACHE[i]


@pytest.fixture(scope="session")
def catalog_dir(tmp_path_factory, gan_ckpt_path, sr_ckpt_path):
    """A generated 8-candidate catalog (16x16 lr -> 64x64 sr)."""
    out = tmp_path_factory.mktemp("catalog")
    generate_candidates(gan_ckpt_path, sr_ckpt_path, count=8, seed=9, out_dir=out)
    return out
