"""Report rendering: delimited loss/metric tables plus matplotlib figures.

Every report path writes a CSV next to a PNG figure so results can be
consumed by both scripts and humans.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        return header, [row for row in reader]


def write_loss_history(
    out_dir: str | Path,
    columns: Sequence[str],
    history: Sequence[Sequence[float]],
    stem: str = "loss_history",
) -> tuple[Path, Path]:
    """Persist a training history as CSV and a loss-curve figure."""
    out_dir = Path(out_dir)
    rows = [[step + 1, *row] for step, row in enumerate(history)]
    csv_path = write_csv(out_dir / f"{stem}.csv", columns, rows)

    fig, ax = plt.subplots(figsize=(8, 4.5))
    steps = [r[0] for r in rows]
    for col_idx, name in enumerate(columns[1:], start=1):
        series = [r[col_idx] for r in rows]
        if all(isinstance(v, float) and math.isnan(v) for v in series):
            continue
        ax.plot(steps, series, label=name, linewidth=1.0)
    ax.set_xlabel("step")
    ax.set_ylabel("value")
    ax.set_title(stem.replace("_", " "))
    ax.legend(loc="upper right", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig_path = out_dir / f"{stem}.png"
    fig.savefig(fig_path, dpi=110)
    plt.close(fig)
    return csv_path, fig_path


def write_sr_eval_report(out_dir: str | Path, report: dict, stem: str = "sr_eval") -> tuple[Path, Path]:
    """Persist an evaluate_sr report as CSV plus a per-pair PSNR figure."""
    out_dir = Path(out_dir)
    header = ["source_id", "psnr_model", "psnr_nearest", "psnr_bicubic"]
    rows = [[r["source_id"], r["psnr_model"], r["psnr_nearest"], r["psnr_bicubic"]] for r in report["pairs"]]
    rows.append(["__mean__", *[report["mean"][k] for k in header[1:]]])
    csv_path = write_csv(out_dir / f"{stem}.csv", header, rows)

    fig, ax = plt.subplots(figsize=(max(6, 0.5 * len(report["pairs"])), 4.5))
    idx = range(len(report["pairs"]))
    width = 0.27
    for off, key, color in (
        (-width, "psnr_model", "#2a6fb0"),
        (0.0, "psnr_bicubic", "#999999"),
        (width, "psnr_nearest", "#cccccc"),
    ):
        vals = [min(r[key], 99.0) for r in report["pairs"]]
        ax.bar([i + off for i in idx], vals, width=width, label=key, color=color)
    ax.set_xticks(list(idx))
    ax.set_xticklabels([r["source_id"][:12] for r in report["pairs"]], rotation=60, fontsize=6)
    ax.set_ylabel("PSNR (dB)")
    ax.set_title("super-resolution quality per holdout pair")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig_path = out_dir / f"{stem}.png"
    fig.savefig(fig_path, dpi=110)
    plt.close(fig)
    return csv_path, fig_path


def write_distribution_report(
    out_dir: str | Path, report: dict, stem: str = "distribution"
) -> tuple[Path, Path]:
    """Persist a distribution_report as CSV plus a channel-gap figure."""
    out_dir = Path(out_dir)
    header = ["metric", "value"]
    rows = [
        *[[f"channel_mean_gap_{c}", v] for c, v in zip("rgb", report["channel_mean_gap"])],
        *[[f"channel_std_gap_{c}", v] for c, v in zip("rgb", report["channel_std_gap"])],
        ["mean_gap", report["mean_gap"]],
        ["std_gap", report["std_gap"]],
        ["mean_nn_distance", report["mean_nn_distance"]],
        ["n_samples", report["n_samples"]],
        ["n_real", report["n_real"]],
    ]
    csv_path = write_csv(out_dir / f"{stem}.csv", header, rows)

    fig, ax = plt.subplots(figsize=(6, 4))
    labels = [r[0] for r in rows[:7]]
    values = [float(r[1]) for r in rows[:7]]
    ax.barh(labels, values, color="#2a6fb0")
    ax.set_xlabel("gap / distance")
    ax.set_title("sample vs. dataset statistics")
    fig.tight_layout()
    fig_path = out_dir / f"{stem}.png"
    fig.savefig(fig_path, dpi=110)
    plt.close(fig)
    return csv_path, fig_path
