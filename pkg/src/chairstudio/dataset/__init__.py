from .batching import minibatches
from .ingest import DatasetManifest, ImageRecord, ingest_corpus
from .pairs import PairSet, ResolutionPair, load_pairs, make_sr_pairs, save_pairs
from .synthetic import ChairParams, draw_chair, sample_chair_params, synth_chair_corpus
from .transforms import downscale, preprocess

__all__ = [
    "ChairParams",
    "DatasetManifest",
    "ImageRecord",
    "PairSet",
    "ResolutionPair",
    "downscale",
    "draw_chair",
    "ingest_corpus",
    "load_pairs",
    "make_sr_pairs",
    "minibatches",
    "preprocess",
    "sample_chair_params",
    "save_pairs",
    "synth_chair_corpus",
]
