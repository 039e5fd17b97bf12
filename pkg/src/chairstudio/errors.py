"""Exception taxonomy shared by every module.

Gateway code maps each of these onto exactly one machine-readable API
error code, so new failure modes should get their own class here rather
than reusing a generic one.
"""


class ChairStudioError(Exception):
    """Base class for all errors raised by this package."""


class CorpusEmpty(ChairStudioError):
    """No decodable images were found while ingesting a corpus."""


class DecodeError(ChairStudioError):
    """An image file could not be read or decoded."""


class ShapeError(ChairStudioError):
    """Tensor dimensions violate an operation's contract."""


class EmptyDataset(ChairStudioError):
    """An id list or batch that must be non-empty was empty."""


class IoError(ChairStudioError):
    """A filesystem write failed (unwritable directory, disk full)."""


class ConfigError(ChairStudioError):
    """A configuration document violates an invariant."""


class CheckpointError(ChairStudioError):
    """A checkpoint file is missing, corrupt, or of the wrong kind."""


class TrainingDiverged(ChairStudioError):
    """A loss became non-finite; the state before the step is preserved."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class StageError(ChairStudioError):
    """A pipeline stage failed; earlier artifacts remain on disk."""

    def __init__(self, message: str, stage: str):
        super().__init__(message)
        self.stage = stage


class NotFound(ChairStudioError):
    """A referenced id does not exist."""


class RevisionConflict(ChairStudioError):
    """A selection mutation carried a stale revision counter."""

    def __init__(self, message: str, current_revision: int):
        super().__init__(message)
        self.current_revision = current_revision
