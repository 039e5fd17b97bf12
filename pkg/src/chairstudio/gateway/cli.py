"""Umbrella CLI: every pipeline stage, reports, and the HTTP service.

All commands read one config document (JSON or TOML) plus repeatable
`--set section.key=value` overrides; artifact locations default to the
config's data root, which can also come from CHAIRSTUDIO_DATA_ROOT.
Report-producing commands write a CSV and a rendered PNG figure side
by side.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..candidates.catalog import CandidateCatalog, generate_candidates, load_generation_models, render_candidate
from ..candidates.grid import save_grid
from ..candidates.latent import interpolate_latents
from ..ckpt import load_checkpoint
from ..dataset.ingest import DatasetManifest, ingest_corpus
from ..dataset.pairs import load_pairs, make_sr_pairs, save_pairs
from ..dataset.synthetic import synth_chair_corpus
from ..errors import ChairStudioError
from ..imgio import save_image
from ..reporting import write_loss_history, write_sr_eval_report
from ..superres.metrics import evaluate_sr
from ..superres.train import SR_HISTORY_COLUMNS, finetune_sr, sr_generator_from_checkpoint
from ..synthesis.train import HISTORY_COLUMNS, train_synthesis
from .config import DATA_ROOT_ENV, PipelineConfig, load_pipeline_config
from .pipeline import run_pipeline


def _load_config(ctx: click.Context) -> PipelineConfig:
    params = ctx.obj
    overrides = list(params["set"])
    if params["data_root"]:
        overrides.append(f"data_root={params['data_root']}")
    try:
        return load_pipeline_config(params["config"], overrides)
    except ChairStudioError as exc:
        _fail(exc)


@click.group()
@click.option("--config", type=click.Path(), default=None, help="JSON or TOML config document.")
@click.option(
    "--set",
    "set_",
    multiple=True,
    metavar="KEY=VALUE",
    help="Override a config key by dotted path, e.g. --set gan.epochs=4.",
)
@click.option(
    "--data-root",
    default=None,
    envvar=DATA_ROOT_ENV,
    help=f"Artifact directory (or set {DATA_ROOT_ENV}).",
)
@click.pass_context
def main(ctx: click.Context, config: str | None, set_: tuple[str, ...], data_root: str | None):
    """Generative chair-design studio: dataset, training, catalog, service."""
    ctx.obj = {"config": config, "set": list(set_), "data_root": data_root}


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


@main.result_callback()
@click.pass_context
def _done(ctx, result, **kwargs):  # pragma: no cover - click plumbing
    return result


@main.command("synth-corpus")
@click.option("--count", type=int, default=None)
@click.option("--resolution", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.pass_context
def synth_corpus_cmd(ctx, count, resolution, out, seed):
    """Draw a procedural chair corpus to disk."""
    cfg = _load_config(ctx)
    try:
        manifest = synth_chair_corpus(
            count or cfg.synth_count,
            resolution or cfg.corpus_hr_resolution,
            seed if seed is not None else cfg.seed,
            Path(out) if out else cfg.corpus_path,
        )
    except ChairStudioError as exc:
        _fail(exc)
    click.echo(f"wrote {len(manifest.records)} images to {manifest.root}")


@main.command("ingest")
@click.option("--corpus", type=click.Path(), default=None)
@click.option("--resolution", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_context
def ingest_cmd(ctx, corpus, resolution, out):
    """Scan a corpus directory into a dataset manifest."""
    cfg = _load_config(ctx)
    try:
        manifest = ingest_corpus(
            Path(corpus) if corpus else cfg.corpus_path,
            resolution or cfg.corpus_hr_resolution,
            cfg.seed,
        )
        path = Path(out) if out else cfg.manifest_path
        manifest.save(path)
    except ChairStudioError as exc:
        _fail(exc)
    click.echo(
        f"manifest {path}: {len(manifest.records)} records "
        f"({len(manifest.train_ids)} train / {len(manifest.holdout_ids)} holdout, "
        f"{manifest.skipped} skipped)"
    )


@main.command("train-gan")
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--max-steps", type=int, default=None)
@click.option("--resume", type=click.Path(exists=True), default=None)
@click.option("--checkpoint-every", type=int, default=None)
@click.pass_context
def train_gan_cmd(ctx, epochs, batch_size, max_steps, resume, checkpoint_every):
    """Train the synthesis pair; writes checkpoint, loss CSV, and figure."""
    cfg = _load_config(ctx)
    try:
        manifest = DatasetManifest.load(cfg.manifest_path)
        train_config = cfg.gan.build(cfg.synthesis_resolution)
        if epochs or batch_size:
            from dataclasses import replace

            train_config = replace(
                train_config,
                epochs=epochs or train_config.epochs,
                batch_size=batch_size or train_config.batch_size,
            )
        ckpt = train_synthesis(
            manifest,
            train_config,
            cfg.seed,
            cfg.gan_dir,
            checkpoint_every=checkpoint_every,
            resume_from=resume,
            max_steps=max_steps,
            progress=True,
        )
        csv_path, fig_path = write_loss_history(
            cfg.gan_dir, HISTORY_COLUMNS, ckpt.tensors["history/losses"].tolist()
        )
    except ChairStudioError as exc:
        _fail(exc)
    click.echo(f"checkpoint {cfg.gan_checkpoint} (step {ckpt.meta['step']})")
    click.echo(f"loss history: {csv_path} and {fig_path}")
    if ckpt.meta["diverged"]:
        click.echo("warning: training diverged; checkpoint holds the last finite state", err=True)


@main.command("make-pairs")
@click.option("--max-pairs", type=int, default=None)
@click.option("--holdout", is_flag=True, help="Build pairs from the holdout split instead.")
@click.pass_context
def make_pairs_cmd(ctx, max_pairs, holdout):
    """Derive aligned high/low-resolution training pairs."""
    cfg = _load_config(ctx)
    try:
        manifest = DatasetManifest.load(cfg.manifest_path)
        ids = manifest.holdout_ids if holdout else manifest.train_ids
        ids = ids[: (max_pairs or cfg.sr.max_pairs)]
        pair_set = make_sr_pairs(manifest, cfg.corpus_hr_resolution, cfg.sr_factor, ids=ids)
        out_dir = cfg.pairs_dir if not holdout else cfg.root / "pairs_holdout"
        save_pairs(pair_set, out_dir)
    except ChairStudioError as exc:
        _fail(exc)
    click.echo(f"wrote {len(pair_set)} pairs to {out_dir} ({pair_set.skipped} skipped)")


@main.command("finetune-sr")
@click.option("--resume", type=click.Path(exists=True), default=None)
@click.option("--checkpoint-every", type=int, default=None)
@click.pass_context
def finetune_sr_cmd(ctx, resume, checkpoint_every):
    """Two-phase super-resolution fine-tuning on the saved pairs."""
    cfg = _load_config(ctx)
    try:
        pair_set = load_pairs(cfg.pairs_dir)
        ckpt = finetune_sr(
            pair_set,
            cfg.sr.build(),
            cfg.seed,
            cfg.sr_dir,
            checkpoint_every=checkpoint_every,
            resume_from=resume,
            progress=True,
        )
        csv_path, fig_path = write_loss_history(
            cfg.sr_dir,
            SR_HISTORY_COLUMNS,
            ckpt.tensors["history/losses"].tolist(),
            stem="sr_loss_history",
        )
    except ChairStudioError as exc:
        _fail(exc)
    click.echo(f"checkpoint {cfg.sr_checkpoint} (step {ckpt.meta['step']}, phase {ckpt.meta['phase']})")
    click.echo(f"loss history: {csv_path} and {fig_path}")


@main.command("generate")
@click.option("--count", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--batch", type=int, default=None)
@click.option("--gen-ckpt", type=click.Path(exists=True), default=None)
@click.option("--sr-ckpt", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_context
def generate_cmd(ctx, count, seed, batch, gen_ckpt, sr_ckpt, out):
    """Generate candidates through the full chain into a catalog."""
    cfg = _load_config(ctx)
    try:
        catalog = generate_candidates(
            gen_ckpt or cfg.gan_checkpoint,
            sr_ckpt or cfg.sr_checkpoint,
            count or cfg.candidates.count,
            seed if seed is not None else cfg.candidate_seed,
            Path(out) if out else cfg.catalog_dir,
            batch_size=batch or cfg.candidates.batch_size,
        )
    except ChairStudioError as exc:
        _fail(exc)
    click.echo(f"catalog {catalog.root}: {len(catalog)} candidates")


@main.command("grid")
@click.option("--ids", required=True, help="Comma-separated candidate ids.")
@click.option("--columns", type=int, default=4)
@click.option("--catalog", type=click.Path(), default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_context
def grid_cmd(ctx, ids, columns, catalog, out):
    """Export a contact sheet of super-resolved candidates."""
    cfg = _load_config(ctx)
    try:
        cat = CandidateCatalog.load(Path(catalog) if catalog else cfg.catalog_dir)
        id_list = [s for s in (t.strip() for t in ids.split(",")) if s]
        out_path = Path(out) if out else cfg.root / "grid.png"
        save_grid(cat, id_list, columns, out_path)
    except ChairStudioError as exc:
        _fail(exc)
    click.echo(f"grid sheet: {out_path}")


@main.command("interp")
@click.option("--from-id", "from_id", required=True)
@click.option("--to-id", "to_id", required=True)
@click.option("--steps", type=int, default=5)
@click.option("--mode", type=click.Choice(["linear", "spherical"]), default="linear")
@click.option("--catalog", type=click.Path(), default=None)
@click.option("--gen-ckpt", type=click.Path(exists=True), default=None)
@click.option("--sr-ckpt", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_context
def interp_cmd(ctx, from_id, to_id, steps, mode, catalog, gen_ckpt, sr_ckpt, out):
    """Render an interpolation path between two stored candidates."""
    cfg = _load_config(ctx)
    try:
        cat = CandidateCatalog.load(Path(catalog) if catalog else cfg.catalog_dir)
        models = load_generation_models(
            gen_ckpt or cfg.gan_checkpoint, sr_ckpt or cfg.sr_checkpoint
        )
        a = cat.get(from_id).latent_tensor()
        b = cat.get(to_id).latent_tensor()
        path = interpolate_latents(a, b, steps, mode)
        out_dir = Path(out) if out else cfg.root / f"interp_{from_id}_{to_id}"
        out_dir.mkdir(parents=True, exist_ok=True)
        rows = []
        for i, z in enumerate(path):
            lr, sr = render_candidate(models, z)
            save_image(lr, out_dir / f"{i:03d}_lr.png")
            save_image(sr, out_dir / f"{i:03d}_sr.png")
            rows.append({"index": i, "latent": [float(v) for v in z]})
        (out_dir / "path.json").write_text(json.dumps(rows, indent=2) + "\n")
    except ChairStudioError as exc:
        _fail(exc)
    click.echo(f"wrote {steps} steps to {out_dir}")


@main.command("eval-sr")
@click.option("--ckpt", type=click.Path(exists=True), default=None)
@click.option("--pairs-dir", type=click.Path(), default=None)
@click.option("--holdout/--no-holdout", default=True, help="Evaluate on the holdout split.")
@click.option("--report-dir", type=click.Path(), default=None)
@click.pass_context
def eval_sr_cmd(ctx, ckpt, pairs_dir, holdout, report_dir):
    """PSNR report against nearest/bicubic baselines (CSV + figure + JSON)."""
    cfg = _load_config(ctx)
    try:
        checkpoint = load_checkpoint(ckpt or cfg.sr_checkpoint, expect_kind="superres")
        generator = sr_generator_from_checkpoint(checkpoint)
        if pairs_dir:
            pair_set = load_pairs(pairs_dir)
        else:
            manifest = DatasetManifest.load(cfg.manifest_path)
            ids = manifest.holdout_ids if holdout and manifest.holdout_ids else manifest.train_ids
            pair_set = make_sr_pairs(
                manifest, cfg.corpus_hr_resolution, cfg.sr_factor, ids=ids[: cfg.sr.max_pairs]
            )
        report = evaluate_sr(generator, pair_set)
        out_dir = Path(report_dir) if report_dir else cfg.root / "reports"
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path, fig_path = write_sr_eval_report(out_dir, report)
        (out_dir / "sr_eval.json").write_text(json.dumps(report, indent=2) + "\n")
    except ChairStudioError as exc:
        _fail(exc)
    m = report["mean"]
    click.echo(
        f"mean PSNR: model {m['psnr_model']:.2f} dB, "
        f"bicubic {m['psnr_bicubic']:.2f} dB, nearest {m['psnr_nearest']:.2f} dB"
    )
    click.echo(f"report: {csv_path}, {fig_path}, {out_dir / 'sr_eval.json'}")


@main.command("pipeline")
@click.option("--force", is_flag=True, help="Rebuild every stage even if artifacts exist.")
@click.pass_context
def pipeline_cmd(ctx, force):
    """Run ingest -> train-gan -> make-pairs -> finetune-sr -> generate."""
    cfg = _load_config(ctx)
    try:
        summary = run_pipeline(cfg, force=force, progress=True)
    except ChairStudioError as exc:
        _fail(exc)
    for stage, state in summary["stages"].items():
        click.echo(f"  {stage:12s} {state}")
    click.echo(f"summary: {cfg.root / 'pipeline_summary.json'}")


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option("--catalog", type=click.Path(), default=None)
@click.option("--gen-ckpt", type=click.Path(), default=None)
@click.option("--sr-ckpt", type=click.Path(), default=None)
@click.option("--selections-dir", type=click.Path(), default=None)
@click.pass_context
def serve_cmd(ctx, host, port, catalog, gen_ckpt, sr_ckpt, selections_dir):
    """Serve the browsing/generation/selection API over HTTP."""
    cfg = _load_config(ctx)
    from .service import serve

    gen_path = Path(gen_ckpt) if gen_ckpt else cfg.gan_checkpoint
    sr_path = Path(sr_ckpt) if sr_ckpt else cfg.sr_checkpoint
    try:
        serve(
            Path(catalog) if catalog else cfg.catalog_dir,
            gen_path if gen_path.exists() else None,
            sr_path if sr_path.exists() else None,
            Path(selections_dir) if selections_dir else cfg.selections_dir,
            host=host,
            port=port,
        )
    except ChairStudioError as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
