"""chairstudio: a generative design studio for chair silhouettes.

Pipeline: ingest or synthesize a corpus, train a latent-variable
synthesis model, fine-tune a 4x super-resolution model on derived
pairs, then batch-generate a browsable candidate catalog with full
provenance. A CLI and HTTP gateway expose the whole chain.
"""

from . import candidates, dataset, gateway, superres, synthesis
from .errors import (
    ChairStudioError,
    CheckpointError,
    ConfigError,
    CorpusEmpty,
    DecodeError,
    EmptyDataset,
    IoError,
    NotFound,
    RevisionConflict,
    ShapeError,
    StageError,
    TrainingDiverged,
)

__version__ = "1.0.0"

__all__ = [
    "ChairStudioError",
    "CheckpointError",
    "ConfigError",
    "CorpusEmpty",
    "DecodeError",
    "EmptyDataset",
    "IoError",
    "NotFound",
    "RevisionConflict",
    "ShapeError",
    "StageError",
    "TrainingDiverged",
    "__version__",
    "candidates",
    "dataset",
    "gateway",
    "superres",
    "synthesis",
]
