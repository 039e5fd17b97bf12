"""Generator and discriminator architectures for latent-to-image synthesis.

The generator projects a latent vector to a small spatial grid, then
doubles the resolution with fractional-strided convolutions until it
reaches the configured output size; a tanh maps onto [-1, 1]. The
discriminator mirrors it with strided convolutions and leaky ReLUs and
emits one probability per image.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import torch
from torch import nn

from ..errors import ConfigError, ShapeError

# Sigmoid saturates to exactly 0.0/1.0 in float32, so probabilities are
# clamped into the open interval before they reach any log.
PROB_EPS = 1e-7


def _check_resolution(resolution: int, stages: int) -> int:
    if stages < 1:
        raise ConfigError("stages must be >= 1")
    init_size = resolution >> stages
    if init_size < 2 or init_size << stages != resolution:
        raise ConfigError(
            f"resolution {resolution} is not (>=2) * 2**{stages}; "
            "pick a power-of-two multiple of the stage count"
        )
    return init_size


@dataclass(frozen=True)
class GeneratorConfig:
    latent_dim: int = 100
    stages: int = 4
    base_channels: int = 64
    output_resolution: int = 64
    norm: bool = True

    def __post_init__(self) -> None:
        if self.latent_dim < 1:
            raise ConfigError("latent_dim must be >= 1")
        if self.base_channels < 1:
            raise ConfigError("base_channels must be >= 1")
        _check_resolution(self.output_resolution, self.stages)

    @property
    def init_size(self) -> int:
        return self.output_resolution >> self.stages

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DiscriminatorConfig:
    stages: int = 4
    base_channels: int = 64
    input_resolution: int = 64
    leak: float = 0.2
    norm: bool = True

    def __post_init__(self) -> None:
        if self.base_channels < 1:
            raise ConfigError("base_channels must be >= 1")
        if not 0.0 < self.leak < 1.0:
            raise ConfigError("leak must lie in (0, 1)")
        _check_resolution(self.input_resolution, self.stages)

    @property
    def final_size(self) -> int:
        return self.input_resolution >> self.stages

    def to_dict(self) -> dict:
        return asdict(self)


class Generator(nn.Module):
    def __init__(self, config: GeneratorConfig):
        super().__init__()
        self.config = config
        channels = [config.base_channels * 2 ** (config.stages - 1 - i) for i in range(config.stages)]
        layers: list[nn.Module] = [
            nn.ConvTranspose2d(config.latent_dim, channels[0], config.init_size, 1, 0, bias=not config.norm)
        ]
        if config.norm:
            layers.append(nn.BatchNorm2d(channels[0]))
        layers.append(nn.ReLU(inplace=True))
        for i in range(1, config.stages):
            layers.append(nn.ConvTranspose2d(channels[i - 1], channels[i], 4, 2, 1, bias=not config.norm))
            if config.norm:
                layers.append(nn.BatchNorm2d(channels[i]))
            layers.append(nn.ReLU(inplace=True))
        layers.append(nn.ConvTranspose2d(channels[-1], 3, 4, 2, 1))
        layers.append(nn.Tanh())
        self.main = nn.Sequential(*layers)

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        if z.dim() != 2 or z.shape[1] != self.config.latent_dim:
            raise ShapeError(
                f"latents must be (n, {self.config.latent_dim}), got {tuple(z.shape)}"
            )
        return self.main(z.view(z.shape[0], z.shape[1], 1, 1))


class Discriminator(nn.Module):
    def __init__(self, config: DiscriminatorConfig):
        super().__init__()
        self.config = config
        channels = [config.base_channels * 2**i for i in range(config.stages)]
        layers: list[nn.Module] = [
            nn.Conv2d(3, channels[0], 4, 2, 1),
            nn.LeakyReLU(config.leak, inplace=True),
        ]
        for i in range(1, config.stages):
            layers.append(nn.Conv2d(channels[i - 1], channels[i], 4, 2, 1, bias=not config.norm))
            if config.norm:
                layers.append(nn.BatchNorm2d(channels[i]))
            layers.append(nn.LeakyReLU(config.leak, inplace=True))
        layers.append(nn.Conv2d(channels[-1], 1, config.final_size, 1, 0))
        layers.append(nn.Sigmoid())
        self.main = nn.Sequential(*layers)

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        r = self.config.input_resolution
        if images.dim() != 4 or images.shape[1] != 3 or images.shape[2:] != (r, r):
            raise ShapeError(
                f"images must be (n, 3, {r}, {r}), got {tuple(images.shape)}"
            )
        scores = self.main(images).view(images.shape[0])
        return scores.clamp(PROB_EPS, 1.0 - PROB_EPS)


def init_weights(module: nn.Module, seed: int) -> None:
    """Initialize conv weights N(0, 0.02) and norm scales N(1, 0.02), reproducibly."""
    gen = torch.Generator().manual_seed(seed & 0x7FFFFFFFFFFFFFFF)
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.ConvTranspose2d)):
            m.weight.data.normal_(0.0, 0.02, generator=gen)
            if m.bias is not None:
                m.bias.data.zero_()
        elif isinstance(m, nn.BatchNorm2d):
            m.weight.data.normal_(1.0, 0.02, generator=gen)
            m.bias.data.zero_()


def build_generator(config: GeneratorConfig, seed: int = 0) -> Generator:
    model = Generator(config)
    init_weights(model, seed)
    return model


def build_discriminator(config: DiscriminatorConfig, seed: int = 1) -> Discriminator:
    model = Discriminator(config)
    init_weights(model, seed)
    return model


def generate(generator: Generator, latents: torch.Tensor) -> torch.Tensor:
    """Decode latents to images in eval mode, one sample at a time.

    The per-sample loop makes the result independent of how callers
    batch their requests, which keeps catalog images reproducible.
    """
    if latents.dim() != 2 or latents.shape[1] != generator.config.latent_dim:
        raise ShapeError(
            f"latents must be (n, {generator.config.latent_dim}), got {tuple(latents.shape)}"
        )
    was_training = generator.training
    generator.eval()
    try:
        with torch.no_grad():
            rows = [generator(latents[i : i + 1].float()) for i in range(latents.shape[0])]
    finally:
        generator.train(was_training)
    if not rows:
        r = generator.config.output_resolution
        return torch.empty(0, 3, r, r)
    return torch.cat(rows, dim=0)


def discriminate(discriminator: Discriminator, images: torch.Tensor) -> torch.Tensor:
    """Score images in eval mode; probabilities lie strictly inside (0, 1)."""
    was_training = discriminator.training
    discriminator.eval()
    try:
        with torch.no_grad():
            scores = torch.cat(
                [discriminator(images[i : i + 1].float()) for i in range(images.shape[0])]
            ) if images.shape[0] else torch.empty(0)
    finally:
        discriminator.train(was_training)
    return scores
