"""Frozen feature extractors for perceptual content loss.

An extractor maps an image batch to feature maps taken at an address
(i, j): the activation of the j-th convolution inside the i-th block,
before the i-th pooling step. Extractors are frozen — their parameters
never receive gradients and never change during fine-tuning — so the
content loss is a fixed measuring stick.
"""

from __future__ import annotations

import hashlib

import torch
from torch import nn

from ..errors import ConfigError, ShapeError


class FeatureExtractor(nn.Module):
    """Base class: frozen module with a (block, conv) feature address."""

    def __init__(self, layer: tuple[int, int]):
        super().__init__()
        i, j = layer
        if i < 1 or j < 1:
            raise ConfigError(f"feature address must be >= (1, 1), got {layer}")
        self.layer = (int(i), int(j))

    def freeze(self) -> None:
        for p in self.parameters():
            p.requires_grad_(False)
        self.eval()

    def train(self, mode: bool = True) -> "FeatureExtractor":
        # A frozen extractor ignores train-mode requests.
        return super().train(False)

    def params_hash(self) -> str:
        h = hashlib.sha256()
        for name, p in sorted(self.named_parameters()):
            h.update(name.encode())
            h.update(p.detach().contiguous().numpy().tobytes())
        return h.hexdigest()

    def extract(self, images: torch.Tensor) -> torch.Tensor:
        raise NotImplementedError

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        return self.extract(images)


class RandomConvFeatureExtractor(FeatureExtractor):
    """Small fixed-seed conv stack; cheap, deterministic, and untrained.

    Blocks double their channel width (capped at 8x) and are separated
    by 2x average pooling. Useful wherever the content loss only needs a
    stable nonlinear projection rather than semantic features.
    """

    def __init__(
        self,
        layer: tuple[int, int] = (2, 1),
        channels: int = 8,
        seed: int = 0,
    ):
        super().__init__(layer)
        if channels < 1:
            raise ConfigError("channels must be >= 1")
        self.channels = channels
        self.seed = seed
        blocks, convs = self.layer
        gen = torch.Generator().manual_seed(seed & 0x7FFFFFFFFFFFFFFF)
        self.stages = nn.ModuleList()
        in_ch = 3
        for b in range(1, blocks + 1):
            out_ch = min(channels * 2 ** (b - 1), channels * 8)
            block = nn.ModuleList()
            for _ in range(convs):
                conv = nn.Conv2d(in_ch, out_ch, 3, 1, 1)
                fan_in = in_ch * 9
                conv.weight.data.normal_(0.0, (2.0 / fan_in) ** 0.5, generator=gen)
                conv.bias.data.zero_()
                block.append(conv)
                in_ch = out_ch
            self.stages.append(block)
        self.freeze()

    def extract(self, images: torch.Tensor) -> torch.Tensor:
        if images.dim() != 4 or images.shape[1] != 3:
            raise ShapeError(f"images must be (n, 3, h, w), got {tuple(images.shape)}")
        blocks, _ = self.layer
        x = images
        for b, block in enumerate(self.stages, start=1):
            for conv in block:
                x = torch.nn.functional.leaky_relu(conv(x), 0.1)
            if b < blocks:
                x = torch.nn.functional.avg_pool2d(x, 2)
        return x

    def spec(self) -> dict:
        return {
            "kind": "random_conv",
            "layer": list(self.layer),
            "channels": self.channels,
            "seed": self.seed,
        }


class VggFeatureExtractor(FeatureExtractor):
    """VGG-19 features at the classic (i, j) address; needs torchvision.

    Weights must be supplied locally (state-dict path) or left random;
    nothing is downloaded.
    """

    def __init__(self, layer: tuple[int, int] = (5, 4), weights_path: str | None = None):
        super().__init__(layer)
        try:
            from torchvision.models import vgg19
        except ImportError as exc:  # pragma: no cover - optional dependency
            raise ConfigError(
                "VggFeatureExtractor requires torchvision; install it or use "
                "RandomConvFeatureExtractor"
            ) from exc
        vgg = vgg19(weights=None)
        if weights_path is not None:
            vgg.load_state_dict(torch.load(weights_path, map_location="cpu"))
        # Walk vgg.features counting (pool-block, conv-within-block).
        blocks, convs = self.layer
        picked: list[nn.Module] = []
        b, c = 1, 0
        for m in vgg.features:
            if isinstance(m, nn.MaxPool2d):
                if b == blocks:
                    raise ConfigError(f"address {self.layer} not reached before pool {b}")
                picked.append(m)
                b, c = b + 1, 0
                continue
            picked.append(m)
            if isinstance(m, nn.Conv2d):
                c += 1
            if b == blocks and c == convs and isinstance(m, nn.Conv2d):
                picked.append(nn.ReLU(inplace=False))
                break
        else:
            raise ConfigError(f"address {self.layer} is outside the VGG-19 feature stack")
        self.body = nn.Sequential(*picked)
        self.freeze()

    def extract(self, images: torch.Tensor) -> torch.Tensor:
        if images.dim() != 4 or images.shape[1] != 3:
            raise ShapeError(f"images must be (n, 3, h, w), got {tuple(images.shape)}")
        return self.body(images)

    def spec(self) -> dict:
        return {"kind": "vgg19", "layer": list(self.layer)}


def extractor_from_spec(spec: dict) -> FeatureExtractor:
    kind = spec.get("kind", "random_conv")
    layer = tuple(spec.get("layer", (2, 1)))
    if kind == "random_conv":
        return RandomConvFeatureExtractor(
            layer=layer, channels=spec.get("channels", 8), seed=spec.get("seed", 0)
        )
    if kind == "vgg19":
        return VggFeatureExtractor(layer=layer, weights_path=spec.get("weights_path"))
    raise ConfigError(f"unknown feature extractor kind {kind!r}")
