"""Design candidates: catalog generation, navigation, grids, selections."""

from .catalog import (
    CATALOG_VERSION,
    CREATED_AT_DEFAULT,
    CandidateCatalog,
    CandidateRecord,
    GenerationModels,
    append_candidates,
    generate_candidates,
    load_candidate_image,
    load_generation_models,
    render_candidate,
)
from .grid import export_grid, save_grid
from .latent import MODES, interpolate_latents, neighborhood_samples
from .selections import (
    MAX_RATING,
    SelectionEntry,
    SelectionSet,
    SelectionStore,
)

__all__ = [
    "CATALOG_VERSION",
    "CREATED_AT_DEFAULT",
    "MAX_RATING",
    "MODES",
    "CandidateCatalog",
    "CandidateRecord",
    "GenerationModels",
    "SelectionEntry",
    "SelectionSet",
    "SelectionStore",
    "append_candidates",
    "export_grid",
    "generate_candidates",
    "interpolate_latents",
    "load_candidate_image",
    "load_generation_models",
    "neighborhood_samples",
    "render_candidate",
    "save_grid",
]
