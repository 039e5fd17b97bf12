"""Residual upsampling generator and patch discriminator for 4x super-resolution.

The generator learns a residual on top of a bicubic upsample of its
input: a small residual trunk at low resolution, two pixel-shuffle
doublings, and a zero-initialized output conv, so a freshly built model
reproduces plain bicubic upscaling and training only has to refine it.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import torch
import torch.nn.functional as F
from torch import nn

from ..errors import ConfigError, ShapeError
from ..synthesis.models import PROB_EPS

SCALE_FACTOR = 4


@dataclass(frozen=True)
class SRGeneratorConfig:
    features: int = 16
    blocks: int = 3

    def __post_init__(self) -> None:
        if self.features < 1 or self.blocks < 1:
            raise ConfigError("features and blocks must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SRDiscriminatorConfig:
    base_channels: int = 16
    stages: int = 4
    leak: float = 0.2

    def __post_init__(self) -> None:
        if self.base_channels < 1 or self.stages < 1:
            raise ConfigError("base_channels and stages must be >= 1")
        if not 0.0 < self.leak < 1.0:
            raise ConfigError("leak must lie in (0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)


class ResidualBlock(nn.Module):
    def __init__(self, features: int):
        super().__init__()
        self.conv1 = nn.Conv2d(features, features, 3, 1, 1)
        self.bn1 = nn.BatchNorm2d(features)
        self.act = nn.PReLU(features)
        self.conv2 = nn.Conv2d(features, features, 3, 1, 1)
        self.bn2 = nn.BatchNorm2d(features)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.bn2(self.conv2(self.act(self.bn1(self.conv1(x)))))


class SRGenerator(nn.Module):
    def __init__(self, config: SRGeneratorConfig):
        super().__init__()
        self.config = config
        f = config.features
        self.head = nn.Sequential(nn.Conv2d(3, f, 9, 1, 4), nn.PReLU(f))
        self.blocks = nn.Sequential(*[ResidualBlock(f) for _ in range(config.blocks)])
        self.trunk_tail = nn.Sequential(nn.Conv2d(f, f, 3, 1, 1), nn.BatchNorm2d(f))
        ups = []
        for _ in range(2):  # two pixel-shuffle doublings give the x4 factor
            ups += [nn.Conv2d(f, 4 * f, 3, 1, 1), nn.PixelShuffle(2), nn.PReLU(f)]
        self.upsample = nn.Sequential(*ups)
        self.out = nn.Conv2d(f, 3, 9, 1, 4)

    def forward(self, lr: torch.Tensor) -> torch.Tensor:
        if lr.dim() != 4 or lr.shape[1] != 3:
            raise ShapeError(f"lr batch must be (n, 3, h, w), got {tuple(lr.shape)}")
        base = F.interpolate(
            lr, scale_factor=SCALE_FACTOR, mode="bicubic", align_corners=False
        )
        x = self.head(lr)
        x = x + self.trunk_tail(self.blocks(x))
        return base + self.out(self.upsample(x))


class SRDiscriminator(nn.Module):
    """Strided-conv classifier; global pooling makes it resolution-agnostic."""

    def __init__(self, config: SRDiscriminatorConfig):
        super().__init__()
        self.config = config
        channels = [min(config.base_channels * 2**i, config.base_channels * 8) for i in range(config.stages)]
        layers: list[nn.Module] = [
            nn.Conv2d(3, channels[0], 3, 1, 1),
            nn.LeakyReLU(config.leak, inplace=True),
        ]
        for i in range(1, config.stages):
            layers += [
                nn.Conv2d(channels[i - 1], channels[i], 4, 2, 1),
                nn.BatchNorm2d(channels[i]),
                nn.LeakyReLU(config.leak, inplace=True),
            ]
        self.features = nn.Sequential(*layers)
        self.classify = nn.Conv2d(channels[-1], 1, 1, 1, 0)

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        if images.dim() != 4 or images.shape[1] != 3:
            raise ShapeError(f"images must be (n, 3, h, w), got {tuple(images.shape)}")
        x = self.features(images)
        x = self.classify(x).mean(dim=(1, 2, 3))
        return torch.sigmoid(x).clamp(PROB_EPS, 1.0 - PROB_EPS)


def _seeded_default_init(module: nn.Module, seed: int) -> None:
    gen = torch.Generator().manual_seed(seed & 0x7FFFFFFFFFFFFFFF)
    for m in module.modules():
        if isinstance(m, nn.Conv2d):
            fan_in = m.in_channels * m.kernel_size[0] * m.kernel_size[1]
            bound = (6.0 / fan_in) ** 0.5
            m.weight.data.uniform_(-bound, bound, generator=gen)
            if m.bias is not None:
                m.bias.data.zero_()


def build_sr_generator(config: SRGeneratorConfig, seed: int = 0) -> SRGenerator:
    model = SRGenerator(config)
    _seeded_default_init(model, seed)
    # Start as an identity over bicubic: the learned residual is zero.
    model.out.weight.data.zero_()
    model.out.bias.data.zero_()
    return model


def build_sr_discriminator(config: SRDiscriminatorConfig, seed: int = 1) -> SRDiscriminator:
    model = SRDiscriminator(config)
    _seeded_default_init(model, seed)
    return model


def upscale(generator: SRGenerator, lr_batch: torch.Tensor) -> torch.Tensor:
    """Super-resolve a batch in eval mode, one sample at a time.

    Output resolution is exactly 4x the input and values are clamped
    onto [-1, 1]; results do not depend on how the batch was split.
    """
    if lr_batch.dim() != 4 or lr_batch.shape[1] != 3:
        raise ShapeError(f"lr batch must be (n, 3, h, w), got {tuple(lr_batch.shape)}")
    was_training = generator.training
    generator.eval()
    try:
        with torch.no_grad():
            rows = [
                generator(lr_batch[i : i + 1].float()).clamp(-1.0, 1.0)
                for i in range(lr_batch.shape[0])
            ]
    finally:
        generator.train(was_training)
    if not rows:
        n, _, h, w = lr_batch.shape
        return torch.empty(0, 3, h * SCALE_FACTOR, w * SCALE_FACTOR)
    return torch.cat(rows, dim=0)
