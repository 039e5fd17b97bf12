"""Alternating adversarial training with checkpoint/resume support."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import torch

from ..ckpt import (
    ModelCheckpoint,
    load_checkpoint,
    module_tensors,
    optimizer_tensors,
    restore_module,
    restore_optimizer,
)
from ..dataset.batching import minibatches
from ..dataset.ingest import DatasetManifest
from ..dataset.transforms import preprocess
from ..errors import ConfigError, EmptyDataset, TrainingDiverged
from .losses import LOSS_MODES, adversarial_losses
from .models import (
    Discriminator,
    DiscriminatorConfig,
    Generator,
    GeneratorConfig,
    build_discriminator,
    build_generator,
)

HISTORY_COLUMNS = ("step", "loss_g", "loss_d", "mean_d_real", "mean_d_fake")


@dataclass(frozen=True)
class TrainHyper:
    lr: float = 2e-4
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    loss_mode: str = "non_saturating"
    disc_steps: int = 1

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise ConfigError("lr must be positive")
        if not 0.0 <= self.beta1 < 1.0 or not 0.0 <= self.beta2 < 1.0:
            raise ConfigError("betas must lie in [0, 1)")
        if self.loss_mode not in LOSS_MODES:
            raise ConfigError(f"loss_mode must be one of {LOSS_MODES}")
        if self.disc_steps < 1:
            raise ConfigError("disc_steps must be >= 1")


@dataclass(frozen=True)
class SynthesisTrainConfig:
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    discriminator: DiscriminatorConfig = field(default_factory=DiscriminatorConfig)
    hyper: TrainHyper = field(default_factory=TrainHyper)
    epochs: int = 10
    batch_size: int = 32

    def __post_init__(self) -> None:
        if self.generator.output_resolution != self.discriminator.input_resolution:
            raise ConfigError(
                "generator output resolution must match discriminator input resolution"
            )
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be >= 1")

    def to_dict(self) -> dict:
        return {
            "generator": self.generator.to_dict(),
            "discriminator": self.discriminator.to_dict(),
            "hyper": asdict(self.hyper),
            "epochs": self.epochs,
            "batch_size": self.batch_size,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SynthesisTrainConfig":
        return cls(
            generator=GeneratorConfig(**d["generator"]),
            discriminator=DiscriminatorConfig(**d["discriminator"]),
            hyper=TrainHyper(**d["hyper"]),
            epochs=d["epochs"],
            batch_size=d["batch_size"],
        )


@dataclass
class TrainState:
    config: SynthesisTrainConfig
    generator: Generator
    discriminator: Discriminator
    opt_gen: torch.optim.Adam
    opt_disc: torch.optim.Adam
    noise_rng: torch.Generator
    step: int = 0
    diverged: bool = False
    loss_history: list[tuple[float, float, float, float]] = field(default_factory=list)


def _make_optimizers(
    config: SynthesisTrainConfig, generator: Generator, discriminator: Discriminator
) -> tuple[torch.optim.Adam, torch.optim.Adam]:
    h = config.hyper
    kwargs = dict(lr=h.lr, betas=(h.beta1, h.beta2), eps=h.adam_eps)
    return (
        torch.optim.Adam(generator.parameters(), **kwargs),
        torch.optim.Adam(discriminator.parameters(), **kwargs),
    )


def init_train_state(config: SynthesisTrainConfig, seed: int) -> TrainState:
    generator = build_generator(config.generator, seed)
    discriminator = build_discriminator(config.discriminator, seed + 1)
    opt_gen, opt_disc = _make_optimizers(config, generator, discriminator)
    noise_rng = torch.Generator().manual_seed((seed + 2) & 0x7FFFFFFFFFFFFFFF)
    return TrainState(config, generator, discriminator, opt_gen, opt_disc, noise_rng)


def _snapshot(state: TrainState) -> dict:
    return {
        "gen": {k: v.clone() for k, v in state.generator.state_dict().items()},
        "disc": {k: v.clone() for k, v in state.discriminator.state_dict().items()},
        "optg": optimizer_tensors("optg", state.opt_gen, state.generator),
        "optd": optimizer_tensors("optd", state.opt_disc, state.discriminator),
        "rng": state.noise_rng.get_state().clone(),
        "step": state.step,
        "history_len": len(state.loss_history),
    }


def _restore(state: TrainState, snap: dict) -> None:
    state.generator.load_state_dict(snap["gen"])
    state.discriminator.load_state_dict(snap["disc"])
    state.opt_gen.state.clear()
    state.opt_disc.state.clear()
    restore_optimizer("optg", state.opt_gen, state.generator, snap["optg"])
    restore_optimizer("optd", state.opt_disc, state.discriminator, snap["optd"])
    state.noise_rng.set_state(snap["rng"])
    state.step = snap["step"]
    del state.loss_history[snap["history_len"] :]


def clone_train_state(state: TrainState) -> TrainState:
    """Independent deep copy; useful for lockstep-determinism checks."""
    twin = init_train_state(state.config, seed=0)
    _restore(twin, _snapshot(state))
    twin.diverged = state.diverged
    twin.loss_history = list(state.loss_history)
    return twin


def _noise(state: TrainState, n: int) -> torch.Tensor:
    dim = state.config.generator.latent_dim
    return torch.rand(n, dim, generator=state.noise_rng) * 2.0 - 1.0


def train_step(state: TrainState, real_batch: torch.Tensor) -> tuple[TrainState, dict]:
    """One discriminator update then one generator update, both on fresh noise.

    On a non-finite loss the state is rolled back to its value at entry
    and TrainingDiverged is raised, so the caller still holds the last
    good state.
    """
    if real_batch.numel() == 0:
        raise EmptyDataset("real batch is empty")
    mode = state.config.hyper.loss_mode
    snap = _snapshot(state)
    try:
        n = real_batch.shape[0]
        for _ in range(state.config.hyper.disc_steps):
            fake = state.generator(_noise(state, n))
            d_real = state.discriminator(real_batch)
            d_fake = state.discriminator(fake.detach())
            loss_d, _ = adversarial_losses(d_real, d_fake, mode)
            if not torch.isfinite(loss_d):
                raise TrainingDiverged("discriminator loss is not finite", step=state.step)
            state.opt_disc.zero_grad(set_to_none=True)
            loss_d.backward()
            state.opt_disc.step()

        fake = state.generator(_noise(state, n))
        d_fake_g = state.discriminator(fake)
        _, loss_g = adversarial_losses(d_real.detach(), d_fake_g, mode)
        if not torch.isfinite(loss_g):
            raise TrainingDiverged("generator loss is not finite", step=state.step)
        state.opt_gen.zero_grad(set_to_none=True)
        state.opt_disc.zero_grad(set_to_none=True)
        loss_g.backward()
        state.opt_gen.step()
    except TrainingDiverged:
        _restore(state, snap)
        state.diverged = True
        raise

    state.step += 1
    row = (
        float(loss_g.detach()),
        float(loss_d.detach()),
        float(d_real.detach().mean()),
        float(d_fake.detach().mean()),
    )
    state.loss_history.append(row)
    losses = dict(zip(HISTORY_COLUMNS[1:], row))
    return state, losses


def state_to_checkpoint(state: TrainState, seed: int) -> ModelCheckpoint:
    tensors: dict[str, torch.Tensor] = {}
    tensors.update(module_tensors("gen", state.generator))
    tensors.update(module_tensors("disc", state.discriminator))
    tensors.update(optimizer_tensors("optg", state.opt_gen, state.generator))
    tensors.update(optimizer_tensors("optd", state.opt_disc, state.discriminator))
    tensors["rng/noise"] = state.noise_rng.get_state().clone()
    history = torch.tensor(state.loss_history, dtype=torch.float64).reshape(-1, 4)
    tensors["history/losses"] = history
    return ModelCheckpoint(
        kind="synthesis",
        config=state.config.to_dict(),
        meta={"step": state.step, "seed": seed, "diverged": state.diverged},
        tensors=tensors,
    )


def generator_from_checkpoint(ckpt: ModelCheckpoint) -> Generator:
    """Rebuild only the generator (eval mode) for inference use."""
    if ckpt.kind != "synthesis":
        raise ConfigError(f"expected a synthesis checkpoint, got kind {ckpt.kind!r}")
    generator = Generator(GeneratorConfig(**ckpt.config["generator"]))
    restore_module("gen", generator, ckpt.tensors)
    generator.eval()
    return generator


def state_from_checkpoint(ckpt: ModelCheckpoint) -> TrainState:
    if ckpt.kind != "synthesis":
        raise ConfigError(f"expected a synthesis checkpoint, got kind {ckpt.kind!r}")
    config = SynthesisTrainConfig.from_dict(ckpt.config)
    state = init_train_state(config, seed=ckpt.meta["seed"])
    restore_module("gen", state.generator, ckpt.tensors)
    restore_module("disc", state.discriminator, ckpt.tensors)
    restore_optimizer("optg", state.opt_gen, state.generator, ckpt.tensors)
    restore_optimizer("optd", state.opt_disc, state.discriminator, ckpt.tensors)
    state.noise_rng.set_state(ckpt.tensors["rng/noise"].clone())
    state.step = ckpt.meta["step"]
    state.diverged = ckpt.meta["diverged"]
    state.loss_history = [tuple(r) for r in ckpt.tensors["history/losses"].tolist()]
    return state


def load_training_batches(
    manifest: DatasetManifest,
    resolution: int,
    cache: dict[str, torch.Tensor] | None = None,
) -> dict[str, torch.Tensor]:
    """Decode every training image once; small corpora fit in memory."""
    cache = cache if cache is not None else {}
    for rid in manifest.train_ids:
        if rid not in cache:
            cache[rid] = preprocess(manifest.resolve(rid), resolution)
    return cache


def train_synthesis(
    manifest: DatasetManifest,
    config: SynthesisTrainConfig,
    seed: int,
    checkpoint_dir: str | Path,
    checkpoint_every: int | None = None,
    resume_from: str | Path | ModelCheckpoint | None = None,
    max_steps: int | None = None,
    progress: bool = False,
) -> ModelCheckpoint:
    """Train on the manifest's training split and persist the final state.

    Interrupted runs resume from a checkpoint and replay the exact same
    batch order, because batches depend only on (seed, epoch). If a loss
    diverges the last finite state is saved with its diverged flag set.
    """
    if not manifest.train_ids:
        raise EmptyDataset("manifest has no training records")
    checkpoint_dir = Path(checkpoint_dir)
    checkpoint_dir.mkdir(parents=True, exist_ok=True)

    if resume_from is None:
        state = init_train_state(config, seed)
    else:
        ckpt = (
            resume_from
            if isinstance(resume_from, ModelCheckpoint)
            else load_checkpoint(resume_from, expect_kind="synthesis")
        )
        state = state_from_checkpoint(ckpt)
        config = state.config

    images = load_training_batches(manifest, config.generator.output_resolution)
    steps_per_epoch = math.ceil(len(manifest.train_ids) / config.batch_size)
    total_steps = config.epochs * steps_per_epoch
    if max_steps is not None:
        total_steps = min(total_steps, max_steps)

    def _save(name: str) -> ModelCheckpoint:
        ckpt = state_to_checkpoint(state, seed)
        ckpt.save(checkpoint_dir / name)
        return ckpt

    while state.step < total_steps:
        epoch = state.step // steps_per_epoch
        batches = minibatches(manifest.train_ids, config.batch_size, seed, epoch)
        for i, batch_ids in enumerate(batches):
            if epoch * steps_per_epoch + i < state.step:
                continue  # already done before a resume
            if state.step >= total_steps:
                break
            batch = torch.stack([images[rid] for rid in batch_ids])
            try:
                _, losses = train_step(state, batch)
            except TrainingDiverged:
                final = _save("final.ckpt")
                return final
            if progress and state.step % 100 == 0:
                print(
                    f"step {state.step}/{total_steps} "
                    f"loss_g={losses['loss_g']:.4f} loss_d={losses['loss_d']:.4f}"
                )
            if checkpoint_every and state.step % checkpoint_every == 0:
                _save(f"step_{state.step:07d}.ckpt")

    return _save("final.ckpt")
