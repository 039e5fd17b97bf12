"""Latent-variable image synthesis: models, losses, training, statistics."""

from .losses import LOSS_MODES, adversarial_losses, sample_latent
from .models import (
    PROB_EPS,
    Discriminator,
    DiscriminatorConfig,
    Generator,
    GeneratorConfig,
    build_discriminator,
    build_generator,
    discriminate,
    generate,
    init_weights,
)
from .stats import distribution_report
from .train import (
    HISTORY_COLUMNS,
    SynthesisTrainConfig,
    TrainHyper,
    TrainState,
    clone_train_state,
    generator_from_checkpoint,
    init_train_state,
    state_from_checkpoint,
    state_to_checkpoint,
    train_step,
    train_synthesis,
)

__all__ = [
    "LOSS_MODES",
    "PROB_EPS",
    "HISTORY_COLUMNS",
    "Discriminator",
    "DiscriminatorConfig",
    "Generator",
    "GeneratorConfig",
    "SynthesisTrainConfig",
    "TrainHyper",
    "TrainState",
    "adversarial_losses",
    "build_discriminator",
    "build_generator",
    "clone_train_state",
    "generator_from_checkpoint",
    "discriminate",
    "distribution_report",
    "generate",
    "init_train_state",
    "init_weights",
    "sample_latent",
    "state_from_checkpoint",
    "state_to_checkpoint",
    "train_step",
    "train_synthesis",
]
