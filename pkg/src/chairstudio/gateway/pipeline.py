"""End-to-end orchestration: corpus -> GAN -> pairs -> SR -> catalog.

Each stage persists its artifacts under the config's data root and is
skipped on re-runs when its outputs already exist, so an interrupted
pipeline resumes where it stopped. A stage failure halts the run with
the stage name while keeping every earlier artifact intact.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..candidates.catalog import CandidateCatalog, generate_candidates
from ..dataset.ingest import DatasetManifest, ingest_corpus
from ..dataset.pairs import load_pairs, make_sr_pairs, save_pairs
from ..dataset.synthetic import synth_chair_corpus
from ..errors import ChairStudioError, StageError
from ..imgio import sha256_file
from ..reporting import write_loss_history
from ..superres.train import SR_HISTORY_COLUMNS, finetune_sr
from ..synthesis.train import HISTORY_COLUMNS, train_synthesis
from .config import PipelineConfig

STAGES = ("corpus", "ingest", "train-gan", "make-pairs", "finetune-sr", "generate")


def _run_stage(name: str, fn):
    try:
        return fn()
    except ChairStudioError as exc:
        raise StageError(f"stage {name!r} failed: {exc}", stage=name) from exc
    except OSError as exc:
        raise StageError(f"stage {name!r} failed with an I/O error: {exc}", stage=name) from exc


def run_pipeline(config: PipelineConfig, force: bool = False, progress: bool = False) -> dict:
    """Run all stages in order; returns a summary of artifacts and hashes."""
    root = config.root
    root.mkdir(parents=True, exist_ok=True)
    status: dict[str, str] = {}

    # corpus ------------------------------------------------------------
    corpus_dir = config.corpus_path
    def corpus_stage() -> Path:
        if config.corpus_dir is not None:
            if not corpus_dir.exists():
                raise StageError(f"corpus directory {corpus_dir} does not exist", stage="corpus")
            status["corpus"] = "external"
            return corpus_dir
        if corpus_dir.exists() and any(corpus_dir.glob("*.png")) and not force:
            status["corpus"] = "reused"
            return corpus_dir
        synth_chair_corpus(
            config.synth_count, config.corpus_hr_resolution, config.seed, corpus_dir
        )
        status["corpus"] = "built"
        return corpus_dir
    _run_stage("corpus", corpus_stage)

    # ingest --------------------------------------------------------------
    def ingest_stage() -> DatasetManifest:
        if config.manifest_path.exists() and not force:
            status["ingest"] = "reused"
            return DatasetManifest.load(config.manifest_path)
        manifest = ingest_corpus(corpus_dir, config.corpus_hr_resolution, config.seed)
        manifest.save(config.manifest_path)
        status["ingest"] = "built"
        return manifest
    manifest = _run_stage("ingest", ingest_stage)

    # train-gan -----------------------------------------------------------
    def gan_stage() -> Path:
        if config.gan_checkpoint.exists() and not force:
            status["train-gan"] = "reused"
            return config.gan_checkpoint
        train_config = config.gan.build(config.synthesis_resolution)
        ckpt = train_synthesis(
            manifest, train_config, config.seed, config.gan_dir, progress=progress
        )
        write_loss_history(
            config.gan_dir,
            HISTORY_COLUMNS,
            ckpt.tensors["history/losses"].tolist(),
            stem="loss_history",
        )
        status["train-gan"] = "built"
        return config.gan_checkpoint
    gan_ckpt_path = _run_stage("train-gan", gan_stage)

    # make-pairs ----------------------------------------------------------
    def pairs_stage():
        if (config.pairs_dir / "pairs.json").exists() and not force:
            status["make-pairs"] = "reused"
            return load_pairs(config.pairs_dir)
        ids = manifest.train_ids[: config.sr.max_pairs]
        pair_set = make_sr_pairs(
            manifest, config.corpus_hr_resolution, config.sr_factor, ids=ids
        )
        save_pairs(pair_set, config.pairs_dir)
        status["make-pairs"] = "built"
        return pair_set
    pair_set = _run_stage("make-pairs", pairs_stage)

    # finetune-sr ---------------------------------------------------------
    def sr_stage() -> Path:
        if config.sr_checkpoint.exists() and not force:
            status["finetune-sr"] = "reused"
            return config.sr_checkpoint
        ckpt = finetune_sr(
            pair_set, config.sr.build(), config.seed, config.sr_dir, progress=progress
        )
        write_loss_history(
            config.sr_dir,
            SR_HISTORY_COLUMNS,
            ckpt.tensors["history/losses"].tolist(),
            stem="sr_loss_history",
        )
        status["finetune-sr"] = "built"
        return config.sr_checkpoint
    sr_ckpt_path = _run_stage("finetune-sr", sr_stage)

    # generate ------------------------------------------------------------
    def generate_stage() -> CandidateCatalog:
        head = config.catalog_dir / "catalog.json"
        if head.exists() and not force:
            status["generate"] = "reused"
            return CandidateCatalog.load(config.catalog_dir)
        catalog = generate_candidates(
            gan_ckpt_path,
            sr_ckpt_path,
            config.candidates.count,
            config.candidate_seed,
            config.catalog_dir,
            batch_size=config.candidates.batch_size,
        )
        status["generate"] = "built"
        return catalog
    catalog = _run_stage("generate", generate_stage)

    artifacts = {
        "manifest": config.manifest_path,
        "gan_checkpoint": gan_ckpt_path,
        "pairs": config.pairs_dir / "pairs.json",
        "sr_checkpoint": sr_ckpt_path,
        "catalog_head": config.catalog_dir / "catalog.json",
        "catalog_manifest": config.catalog_dir / "catalog.jsonl",
    }
    summary = {
        "stages": {name: status.get(name, "skipped") for name in STAGES},
        "artifacts": {
            key: {"path": str(path), "sha256": sha256_file(path)}
            for key, path in artifacts.items()
        },
        "candidates": len(catalog),
        "seed": config.seed,
    }
    summary_path = root / "pipeline_summary.json"
    summary_path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return summary
