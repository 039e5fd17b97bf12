"""Build the pristine fixture the UI tests run against: tiny checkpoints
plus a 64-candidate catalog (16x16 lr -> 64x64 sr).

Idempotent: a completed build leaves a marker file and later runs exit
immediately, so the expensive part happens once per checkout. Delete
.fixture-gateway/ to force a rebuild.
"""

from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

import numpy as np
import torch

torch.set_num_threads(1)

from chairstudio.candidates import generate_candidates
from chairstudio.dataset import (
    PairSet,
    ResolutionPair,
    downscale,
    draw_chair,
    sample_chair_params,
    synth_chair_corpus,
)
from chairstudio.imgio import to_normalized
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

RES = 16
CANDIDATES = 64
MARKER = "fixture.json"


def build(root: Path) -> None:
    corpus = synth_chair_corpus(12, RES, seed=3, out_dir=root / "corpus")

    gan_config = SynthesisTrainConfig(
        generator=GeneratorConfig(
            latent_dim=100, stages=2, base_channels=8, output_resolution=RES
        ),
        discriminator=DiscriminatorConfig(stages=2, base_channels=8, input_resolution=RES),
        hyper=TrainHyper(),
        epochs=1,
        batch_size=4,
    )
    train_synthesis(corpus, gan_config, seed=5, checkpoint_dir=root / "gan")

    pairs = []
    for i in range(3):
        rng = np.random.default_rng([77, i])
        hr = to_normalized(draw_chair(sample_chair_params(RES * 4, rng)))
        pairs.append(ResolutionPair(hr=hr, lr=downscale(hr, 4), source_id=f"s{i}"))
    sr_config = SRTrainConfig(
        generator=SRGeneratorConfig(features=4, blocks=1),
        discriminator=SRDiscriminatorConfig(base_channels=4, stages=2),
        content_only_steps=2,
        adversarial_steps=2,
        batch_size=2,
        content_layer=(2, 1),
        extractor={"kind": "random_conv", "layer": [2, 1], "channels": 4, "seed": 0},
    )
    finetune_sr(PairSet(pairs), sr_config, seed=6, checkpoint_dir=root / "sr")

    generate_candidates(
        root / "gan" / "final.ckpt",
        root / "sr" / "final.ckpt",
        count=CANDIDATES,
        seed=9,
        out_dir=root / "catalog",
    )


def main() -> int:
    root = Path(__file__).resolve().parent.parent / ".fixture-gateway"
    marker = root / MARKER
    if marker.exists():
        print(json.dumps({"root": str(root), "rebuilt": False}))
        return 0
    if root.exists():  # partial build from an interrupted run
        shutil.rmtree(root)
    root.mkdir(parents=True)
    build(root)
    marker.write_text(
        json.dumps({"version": 1, "candidates": CANDIDATES, "resolution": RES}) + "\n"
    )
    print(json.dumps({"root": str(root), "rebuilt": True}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
