"""4x super-resolution: models, perceptual losses, fine-tuning, metrics."""

from .features import (
    FeatureExtractor,
    RandomConvFeatureExtractor,
    VggFeatureExtractor,
    extractor_from_spec,
)
from .losses import perceptual_content_loss, sr_losses
from .metrics import bicubic_upscale, evaluate_sr, nearest_upscale, psnr
from .models import (
    SCALE_FACTOR,
    SRDiscriminator,
    SRDiscriminatorConfig,
    SRGenerator,
    SRGeneratorConfig,
    build_sr_discriminator,
    build_sr_generator,
    upscale,
)
from .train import (
    PHASES,
    SR_HISTORY_COLUMNS,
    SRTrainConfig,
    SRTrainState,
    finetune_sr,
    init_sr_state,
    load_pair_tensors,
    sr_generator_from_checkpoint,
    sr_state_from_checkpoint,
    sr_state_to_checkpoint,
    sr_train_step,
)

__all__ = [
    "PHASES",
    "SCALE_FACTOR",
    "SR_HISTORY_COLUMNS",
    "FeatureExtractor",
    "RandomConvFeatureExtractor",
    "SRDiscriminator",
    "SRDiscriminatorConfig",
    "SRGenerator",
    "SRGeneratorConfig",
    "SRTrainConfig",
    "SRTrainState",
    "VggFeatureExtractor",
    "bicubic_upscale",
    "build_sr_discriminator",
    "build_sr_generator",
    "evaluate_sr",
    "extractor_from_spec",
    "finetune_sr",
    "init_sr_state",
    "load_pair_tensors",
    "nearest_upscale",
    "perceptual_content_loss",
    "psnr",
    "sr_losses",
    "sr_generator_from_checkpoint",
    "sr_state_from_checkpoint",
    "sr_state_to_checkpoint",
    "sr_train_step",
    "upscale",
]
