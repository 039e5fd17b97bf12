"""Pipeline configuration: one document that binds every module's knobs.

Configs load from JSON or TOML, can be overridden per-key from CLI
flags (dotted paths), and are validated before any work happens — in
particular the resolution chain invariant
synthesis_resolution * sr_factor == corpus_hr_resolution.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable

from ..errors import ConfigError
from ..superres.models import SCALE_FACTOR, SRDiscriminatorConfig, SRGeneratorConfig
from ..superres.train import SRTrainConfig
from ..synthesis.models import DiscriminatorConfig, GeneratorConfig
from ..synthesis.train import SynthesisTrainConfig, TrainHyper

DATA_ROOT_ENV = "CHAIRSTUDIO_DATA_ROOT"


def _stages_for(resolution: int) -> int:
    # Upsampling stages from a 4x4 projection: 64 -> 4 stages, 32 -> 3.
    stages = 0
    r = resolution
    while r > 4:
        if r % 2:
            raise ConfigError(f"resolution {resolution} is not 4 * 2**k")
        r //= 2
        stages += 1
    if r != 4 or stages < 1:
        raise ConfigError(f"resolution {resolution} is not 4 * 2**k")
    return stages


@dataclass(frozen=True)
class GanSettings:
    epochs: int = 8
    batch_size: int = 32
    latent_dim: int = 100
    base_channels: int = 32
    disc_base_channels: int = 32
    lr: float = 2e-4
    beta1: float = 0.9
    beta2: float = 0.999
    loss_mode: str = "non_saturating"
    disc_steps: int = 1

    def build(self, resolution: int) -> SynthesisTrainConfig:
        stages = _stages_for(resolution)
        return SynthesisTrainConfig(
            generator=GeneratorConfig(
                latent_dim=self.latent_dim,
                stages=stages,
                base_channels=self.base_channels,
                output_resolution=resolution,
            ),
            discriminator=DiscriminatorConfig(
                stages=stages,
                base_channels=self.disc_base_channels,
                input_resolution=resolution,
            ),
            hyper=TrainHyper(
                lr=self.lr,
                beta1=self.beta1,
                beta2=self.beta2,
                loss_mode=self.loss_mode,
                disc_steps=self.disc_steps,
            ),
            epochs=self.epochs,
            batch_size=self.batch_size,
        )


@dataclass(frozen=True)
class SrSettings:
    content_only_steps: int = 300
    adversarial_steps: int = 100
    batch_size: int = 2
    features: int = 16
    blocks: int = 3
    disc_base_channels: int = 16
    disc_stages: int = 4
    adversarial_weight: float = 1e-3
    content_layer: tuple[int, int] = (2, 1)
    extractor_channels: int = 8
    extractor_seed: int = 0
    lr: float = 2e-4
    beta1: float = 0.9
    beta2: float = 0.999
    max_pairs: int = 24

    def build(self) -> SRTrainConfig:
        return SRTrainConfig(
            generator=SRGeneratorConfig(features=self.features, blocks=self.blocks),
            discriminator=SRDiscriminatorConfig(
                base_channels=self.disc_base_channels, stages=self.disc_stages
            ),
            content_layer=tuple(self.content_layer),
            extractor={
                "kind": "random_conv",
                "layer": list(self.content_layer),
                "channels": self.extractor_channels,
                "seed": self.extractor_seed,
            },
            adversarial_weight=self.adversarial_weight,
            content_only_steps=self.content_only_steps,
            adversarial_steps=self.adversarial_steps,
            batch_size=self.batch_size,
            lr=self.lr,
            beta1=self.beta1,
            beta2=self.beta2,
        )


@dataclass(frozen=True)
class CandidateSettings:
    count: int = 32
    batch_size: int = 16
    seed: int | None = None  # None -> the pipeline seed


@dataclass(frozen=True)
class PipelineConfig:
    data_root: str = "."
    seed: int = 7
    corpus_dir: str | None = None  # None -> synthesize a corpus
    synth_count: int = 128
    corpus_hr_resolution: int = 256
    synthesis_resolution: int = 64
    sr_factor: int = SCALE_FACTOR
    gan: GanSettings = field(default_factory=GanSettings)
    sr: SrSettings = field(default_factory=SrSettings)
    candidates: CandidateSettings = field(default_factory=CandidateSettings)

    def __post_init__(self) -> None:
        if self.synthesis_resolution * self.sr_factor != self.corpus_hr_resolution:
            raise ConfigError(
                f"resolution chain broken: {self.synthesis_resolution} * {self.sr_factor} "
                f"!= {self.corpus_hr_resolution}"
            )
        if self.sr_factor != SCALE_FACTOR:
            raise ConfigError(f"sr_factor is fixed at {SCALE_FACTOR}")
        if self.synth_count < 1:
            raise ConfigError("synth_count must be >= 1")
        _stages_for(self.synthesis_resolution)

    # -- canonical artifact locations ------------------------------------

    @property
    def root(self) -> Path:
        return Path(self.data_root)

    @property
    def corpus_path(self) -> Path:
        return Path(self.corpus_dir) if self.corpus_dir else self.root / "corpus"

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    @property
    def gan_dir(self) -> Path:
        return self.root / "gan"

    @property
    def gan_checkpoint(self) -> Path:
        return self.gan_dir / "final.ckpt"

    @property
    def pairs_dir(self) -> Path:
        return self.root / "pairs"

    @property
    def sr_dir(self) -> Path:
        return self.root / "sr"

    @property
    def sr_checkpoint(self) -> Path:
        return self.sr_dir / "final.ckpt"

    @property
    def catalog_dir(self) -> Path:
        return self.root / "catalog"

    @property
    def selections_dir(self) -> Path:
        return self.root / "selections"

    @property
    def candidate_seed(self) -> int:
        return self.candidates.seed if self.candidates.seed is not None else self.seed

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sr"]["content_layer"] = list(self.sr.content_layer)
        return d


def _coerce_section(cls, value, path: str):
    if not isinstance(value, dict):
        raise ConfigError(f"config section {path!r} must be a table/object")
    fields = {f for f in cls.__dataclass_fields__}
    unknown = set(value) - fields
    if unknown:
        raise ConfigError(f"unknown keys in {path!r}: {sorted(unknown)}")
    if "content_layer" in value and value["content_layer"] is not None:
        value = dict(value)
        value["content_layer"] = tuple(value["content_layer"])
    try:
        return cls(**value)
    except TypeError as exc:
        raise ConfigError(f"bad config section {path!r}: {exc}") from exc


def config_from_dict(doc: dict) -> PipelineConfig:
    doc = dict(doc)
    sections = {
        "gan": GanSettings,
        "sr": SrSettings,
        "candidates": CandidateSettings,
    }
    kwargs = {}
    for key, value in doc.items():
        if key in sections:
            kwargs[key] = _coerce_section(sections[key], value, key)
        elif key in PipelineConfig.__dataclass_fields__:
            kwargs[key] = value
        else:
            raise ConfigError(f"unknown config key {key!r}")
    if "data_root" not in kwargs and os.environ.get(DATA_ROOT_ENV):
        kwargs["data_root"] = os.environ[DATA_ROOT_ENV]
    return PipelineConfig(**kwargs)


def _read_document(path: Path) -> dict:
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ImportError:  # python < 3.11
            import tomli as tomllib
        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: invalid TOML ({exc})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def _apply_override(doc: dict, dotted: str, raw: str) -> None:
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    keys = dotted.split(".")
    node = doc
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override path {dotted!r} crosses a non-table value")
    node[keys[-1]] = value


def load_pipeline_config(
    path: str | Path | None = None,
    overrides: dict[str, str] | Iterable[str] | None = None,
) -> PipelineConfig:
    """Load a config document and apply `key.path=value` overrides.

    `overrides` is either a mapping of dotted paths to raw values or an
    iterable of "key.path=value" strings (as collected from --set flags).
    """
    doc: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        doc = _read_document(p)
    if overrides is None:
        pairs: list[tuple[str, str]] = []
    elif isinstance(overrides, dict):
        pairs = list(overrides.items())
    else:
        pairs = []
        for item in overrides:
            key, sep, raw = str(item).partition("=")
            if not sep or not key:
                raise ConfigError(f"override must look like key.path=value, got {item!r}")
            pairs.append((key, raw))
    for dotted, raw in pairs:
        _apply_override(doc, dotted, raw)
    return config_from_dict(doc)
