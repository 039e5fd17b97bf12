"""Two-phase super-resolution fine-tuning: content-only, then adversarial."""

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
from ..errors import ConfigError, EmptyDataset, ShapeError, TrainingDiverged
from .features import FeatureExtractor, extractor_from_spec
from .losses import perceptual_content_loss, sr_losses
from .models import (
    SCALE_FACTOR,
    SRDiscriminator,
    SRDiscriminatorConfig,
    SRGenerator,
    SRGeneratorConfig,
    build_sr_discriminator,
    build_sr_generator,
)

SR_HISTORY_COLUMNS = ("step", "loss_g", "loss_d", "content", "mean_d_hr", "mean_d_sr")
PHASES = ("content", "adversarial")


@dataclass(frozen=True)
class SRTrainConfig:
    generator: SRGeneratorConfig = field(default_factory=SRGeneratorConfig)
    discriminator: SRDiscriminatorConfig = field(default_factory=SRDiscriminatorConfig)
    scale_factor: int = SCALE_FACTOR
    content_layer: tuple[int, int] = (5, 4)
    extractor: dict = field(default_factory=dict)
    adversarial_weight: float = 1e-3
    content_only_steps: int = 500
    adversarial_steps: int = 200
    batch_size: int = 2
    lr: float = 2e-4
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.scale_factor != SCALE_FACTOR:
            raise ConfigError(f"scale_factor is fixed at {SCALE_FACTOR}")
        if self.adversarial_weight < 0:
            raise ConfigError("adversarial_weight must be >= 0")
        if self.content_only_steps < 0 or self.adversarial_steps < 0:
            raise ConfigError("phase step counts must be >= 0")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.lr <= 0:
            raise ConfigError("lr must be positive")

    @property
    def total_steps(self) -> int:
        return self.content_only_steps + self.adversarial_steps

    def extractor_spec(self) -> dict:
        spec = dict(self.extractor) if self.extractor else {"kind": "random_conv"}
        spec.setdefault("layer", list(self.content_layer))
        return spec

    def to_dict(self) -> dict:
        d = asdict(self)
        d["generator"] = self.generator.to_dict()
        d["discriminator"] = self.discriminator.to_dict()
        d["content_layer"] = list(self.content_layer)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SRTrainConfig":
        d = dict(d)
        d["generator"] = SRGeneratorConfig(**d["generator"])
        d["discriminator"] = SRDiscriminatorConfig(**d["discriminator"])
        d["content_layer"] = tuple(d["content_layer"])
        return cls(**d)


@dataclass
class SRTrainState:
    config: SRTrainConfig
    generator: SRGenerator
    discriminator: SRDiscriminator
    opt_gen: torch.optim.Adam
    opt_disc: torch.optim.Adam
    step: int = 0
    diverged: bool = False
    loss_history: list[tuple[float, float, float, float, float]] = field(default_factory=list)

    @property
    def phase(self) -> str:
        return "content" if self.step < self.config.content_only_steps else "adversarial"


def init_sr_state(config: SRTrainConfig, seed: int) -> SRTrainState:
    generator = build_sr_generator(config.generator, seed)
    discriminator = build_sr_discriminator(config.discriminator, seed + 1)
    kwargs = dict(lr=config.lr, betas=(config.beta1, config.beta2), eps=config.adam_eps)
    return SRTrainState(
        config,
        generator,
        discriminator,
        torch.optim.Adam(generator.parameters(), **kwargs),
        torch.optim.Adam(discriminator.parameters(), **kwargs),
    )


def _snapshot(state: SRTrainState) -> dict:
    return {
        "gen": {k: v.clone() for k, v in state.generator.state_dict().items()},
        "disc": {k: v.clone() for k, v in state.discriminator.state_dict().items()},
        "optg": optimizer_tensors("optg", state.opt_gen, state.generator),
        "optd": optimizer_tensors("optd", state.opt_disc, state.discriminator),
        "step": state.step,
        "history_len": len(state.loss_history),
    }


def _restore(state: SRTrainState, snap: dict) -> None:
    state.generator.load_state_dict(snap["gen"])
    state.discriminator.load_state_dict(snap["disc"])
    state.opt_gen.state.clear()
    state.opt_disc.state.clear()
    restore_optimizer("optg", state.opt_gen, state.generator, snap["optg"])
    restore_optimizer("optd", state.opt_disc, state.discriminator, snap["optd"])
    state.step = snap["step"]
    del state.loss_history[snap["history_len"] :]


def sr_train_step(
    state: SRTrainState,
    hr_batch: torch.Tensor,
    lr_batch: torch.Tensor,
    extractor: FeatureExtractor,
) -> tuple[SRTrainState, dict]:
    """One optimization step; which losses apply depends on the phase.

    The content phase updates only the generator on the perceptual
    content loss. The adversarial phase first updates the discriminator,
    then the generator on content + weight * adversarial.
    """
    if hr_batch.numel() == 0 or lr_batch.numel() == 0:
        raise EmptyDataset("batches must be non-empty")
    if hr_batch.shape[2:] != tuple(s * SCALE_FACTOR for s in lr_batch.shape[2:]):
        raise ShapeError(
            f"hr {tuple(hr_batch.shape)} is not {SCALE_FACTOR}x lr {tuple(lr_batch.shape)}"
        )
    cfg = state.config
    snap = _snapshot(state)
    try:
        sr = state.generator(lr_batch)
        phi_hr = extractor(hr_batch).detach()
        content = perceptual_content_loss(phi_hr, extractor(sr))
        if not torch.isfinite(content):
            raise TrainingDiverged("content loss is not finite", step=state.step)

        if state.phase == "content":
            state.opt_gen.zero_grad(set_to_none=True)
            content.backward()
            state.opt_gen.step()
            row = (float(content.detach()), math.nan, float(content.detach()), math.nan, math.nan)
        else:
            d_hr = state.discriminator(hr_batch)
            d_sr_detached = state.discriminator(sr.detach())
            loss_d, _ = sr_losses(d_hr, d_sr_detached, content.detach(), cfg.adversarial_weight)
            if not torch.isfinite(loss_d):
                raise TrainingDiverged("discriminator loss is not finite", step=state.step)
            state.opt_disc.zero_grad(set_to_none=True)
            loss_d.backward()
            state.opt_disc.step()

            d_sr = state.discriminator(sr)
            _, loss_g = sr_losses(d_hr.detach(), d_sr, content, cfg.adversarial_weight)
            if not torch.isfinite(loss_g):
                raise TrainingDiverged("generator loss is not finite", step=state.step)
            state.opt_gen.zero_grad(set_to_none=True)
            state.opt_disc.zero_grad(set_to_none=True)
            loss_g.backward()
            state.opt_gen.step()
            row = (
                float(loss_g.detach()),
                float(loss_d.detach()),
                float(content.detach()),
                float(d_hr.detach().mean()),
                float(d_sr_detached.detach().mean()),
            )
    except TrainingDiverged:
        _restore(state, snap)
        state.diverged = True
        raise

    state.step += 1
    state.loss_history.append(row)
    return state, dict(zip(SR_HISTORY_COLUMNS[1:], row))


def sr_state_to_checkpoint(
    state: SRTrainState, seed: int, extractor: FeatureExtractor
) -> ModelCheckpoint:
    tensors: dict[str, torch.Tensor] = {}
    tensors.update(module_tensors("gen", state.generator))
    tensors.update(module_tensors("disc", state.discriminator))
    tensors.update(optimizer_tensors("optg", state.opt_gen, state.generator))
    tensors.update(optimizer_tensors("optd", state.opt_disc, state.discriminator))
    tensors["history/losses"] = torch.tensor(state.loss_history, dtype=torch.float64).reshape(-1, 5)
    meta = {
        "step": state.step,
        "seed": seed,
        "diverged": state.diverged,
        "phase": state.phase,
        "extractor": state.config.extractor_spec(),
        "extractor_params_hash": extractor.params_hash(),
    }
    return ModelCheckpoint(kind="superres", config=state.config.to_dict(), meta=meta, tensors=tensors)


def sr_generator_from_checkpoint(ckpt: ModelCheckpoint) -> SRGenerator:
    """Rebuild only the SR generator (eval mode) for inference use."""
    if ckpt.kind != "superres":
        raise ConfigError(f"expected a superres checkpoint, got kind {ckpt.kind!r}")
    generator = SRGenerator(SRGeneratorConfig(**ckpt.config["generator"]))
    restore_module("gen", generator, ckpt.tensors)
    generator.eval()
    return generator


def sr_state_from_checkpoint(ckpt: ModelCheckpoint) -> SRTrainState:
    if ckpt.kind != "superres":
        raise ConfigError(f"expected a superres checkpoint, got kind {ckpt.kind!r}")
    config = SRTrainConfig.from_dict(ckpt.config)
    state = init_sr_state(config, seed=ckpt.meta["seed"])
    restore_module("gen", state.generator, ckpt.tensors)
    restore_module("disc", state.discriminator, ckpt.tensors)
    restore_optimizer("optg", state.opt_gen, state.generator, ckpt.tensors)
    restore_optimizer("optd", state.opt_disc, state.discriminator, ckpt.tensors)
    state.step = ckpt.meta["step"]
    state.diverged = ckpt.meta["diverged"]
    state.loss_history = [tuple(r) for r in ckpt.tensors["history/losses"].tolist()]
    return state


def load_pair_tensors(pairs) -> tuple[torch.Tensor, torch.Tensor]:
    if len(pairs) == 0:
        raise EmptyDataset("pair set is empty")
    hr = torch.stack([p.hr for p in pairs])
    lr = torch.stack([p.lr for p in pairs])
    return hr, lr


def finetune_sr(
    pairs,
    config: SRTrainConfig,
    seed: int,
    checkpoint_dir: str | Path,
    extractor: FeatureExtractor | None = None,
    checkpoint_every: int | None = None,
    resume_from: str | Path | ModelCheckpoint | None = None,
    progress: bool = False,
) -> ModelCheckpoint:
    """Run both phases over the pair set and persist the final state.

    The phase boundary is crossed exactly once, after
    config.content_only_steps steps. Batch order depends only on
    (seed, epoch), so resumed runs replay the original schedule.
    """
    checkpoint_dir = Path(checkpoint_dir)
    checkpoint_dir.mkdir(parents=True, exist_ok=True)

    if resume_from is None:
        state = init_sr_state(config, seed)
    else:
        ckpt = (
            resume_from
            if isinstance(resume_from, ModelCheckpoint)
            else load_checkpoint(resume_from, expect_kind="superres")
        )
        state = sr_state_from_checkpoint(ckpt)
        config = state.config

    if extractor is None:
        extractor = extractor_from_spec(config.extractor_spec())
    hr_all, lr_all = load_pair_tensors(pairs)
    indices = list(range(len(pairs)))
    steps_per_epoch = math.ceil(len(indices) / config.batch_size)

    def _save(name: str) -> ModelCheckpoint:
        ckpt = sr_state_to_checkpoint(state, seed, extractor)
        ckpt.save(checkpoint_dir / name)
        return ckpt

    while state.step < config.total_steps:
        epoch = state.step // steps_per_epoch
        batches = minibatches(indices, config.batch_size, seed, epoch)
        for i, batch_idx in enumerate(batches):
            if epoch * steps_per_epoch + i < state.step:
                continue
            if state.step >= config.total_steps:
                break
            sel = torch.tensor(batch_idx, dtype=torch.long)
            try:
                _, losses = sr_train_step(state, hr_all[sel], lr_all[sel], extractor)
            except TrainingDiverged:
                return _save("final.ckpt")
            if progress and state.step % 100 == 0:
                print(
                    f"sr step {state.step}/{config.total_steps} [{state.phase}] "
                    f"content={losses['content']:.5f}"
                )
            if checkpoint_every and state.step % checkpoint_every == 0:
                _save(f"step_{state.step:07d}.ckpt")

    return _save("final.ckpt")
