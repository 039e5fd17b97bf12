"""Gateway: pipeline configuration/orchestration, HTTP service, CLI."""

from .config import (
    DATA_ROOT_ENV,
    CandidateSettings,
    GanSettings,
    PipelineConfig,
    SrSettings,
    config_from_dict,
    load_pipeline_config,
)
from .pipeline import STAGES, run_pipeline
from .service import create_service, serve

__all__ = [
    "DATA_ROOT_ENV",
    "STAGES",
    "CandidateSettings",
    "GanSettings",
    "PipelineConfig",
    "SrSettings",
    "config_from_dict",
    "create_service",
    "load_pipeline_config",
    "run_pipeline",
    "serve",
]
