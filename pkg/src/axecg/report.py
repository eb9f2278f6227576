"""Report emission: delimited tables, JSON summaries and rendered figures.

Every artifact is deterministic for a fixed (config, seed): floats use a
fixed format, JSON keys are sorted, figures are rendered with pinned style
settings, and no wall-clock values are serialized (evaluation order is
recorded as ``seq``).
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dse import DesignPoint, SweepRow
from .ecgio import Signal
from .pipeline import PipelineOutput
from .stages import STAGE_DEFS

_FIG_DPI = 110


def fmt(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return f"{v:.6g}"
    return str(v)


def _sanitize(obj):
    if isinstance(obj, float) and (math.isinf(obj) or math.isnan(obj)):
        return fmt(obj)
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return _sanitize(float(obj))
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    return obj


def write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(_sanitize(doc), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def write_sweep_csv(path: Path, rows: list[SweepRow]) -> None:
    write_csv(
        path,
        ["k", "psnr", "ssim", "peak_acc", "energy_reduction"],
        [[r.k, r.psnr, r.ssim, r.peak_acc, r.energy_reduction] for r in rows],
    )


def render_sweep_figure(path: Path, stage_id: str, rows: list[SweepRow]) -> None:
    ks = [r.k for r in rows]
    fig, (ax_q, ax_e) = plt.subplots(2, 1, figsize=(6.4, 5.6), sharex=True)
    finite_psnr = [r.psnr if math.isfinite(r.psnr) else None for r in rows]
    ax_q.plot(ks, [r.peak_acc for r in rows], "o-", color="tab:green", label="peak accuracy [%]")
    ax_q.plot(ks, [100 * r.ssim for r in rows], "s--", color="tab:orange", label="SSIM x100")
    ax_q.plot(ks, finite_psnr, "^:", color="tab:blue", label="PSNR [dB]")
    ax_q.set_ylabel("quality")
    ax_q.set_title(f"{stage_id}: quality and energy vs. approximated output LSBs")
    ax_q.legend(loc="best", fontsize=8)
    ax_q.grid(alpha=0.3)
    ax_e.plot(ks, [r.energy_reduction for r in rows], "d-", color="tab:red")
    ax_e.set_ylabel("energy reduction [x]")
    ax_e.set_xlabel("output LSBs approximated (k)")
    ax_e.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_FIG_DPI)
    plt.close(fig)


_LOG_HEADER = (
    ["run", "seq", "phase"]
    + [f"{sid.lower()}_{fld}" for sid in STAGE_DEFS for fld in ("k", "adder", "mult")]
    + ["psnr", "ssim", "peak_acc", "false_positives", "energy_fj", "reduction", "satisfies"]
)


def _point_row(run: str, p: DesignPoint, satisfies: bool) -> list:
    row: list = [run, p.seq, p.phase]
    for sid in STAGE_DEFS:
        cfg = p.design[sid]
        row.extend([cfg.k_approx, cfg.adder_spec, cfg.mult_spec])
    row.extend(
        [p.pre_psnr, p.pre_ssim, p.peak_acc, p.false_positives,
         p.energy.totals.energy_fj, p.energy.reduction, int(satisfies)]
    )
    return row


def write_exploration_csv(path: Path, runs: list[tuple[str, list[DesignPoint], list[bool]]]) -> None:
    rows = []
    for run, points, flags in runs:
        rows.extend(_point_row(run, p, ok) for p, ok in zip(points, flags))
    write_csv(path, _LOG_HEADER, rows)


def render_explore_figure(path: Path, points: list[DesignPoint], front: list[DesignPoint],
                          metric_id: str, chosen: DesignPoint | None = None) -> None:
    energy = [p.energy.totals.energy_fj for p in points]
    qual = [p.quality(metric_id) for p in points]
    cap = max((q for q in qual if math.isfinite(q)), default=1.0)
    qual = [q if math.isfinite(q) else cap * 1.05 for q in qual]
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.scatter(energy, qual, s=18, color="tab:gray", alpha=0.6, label="evaluated designs")
    if front:
        fe = [p.energy.totals.energy_fj for p in front]
        fq = [min(p.quality(metric_id), cap * 1.05) for p in front]
        ax.plot(fe, fq, "o-", color="tab:red", label="Pareto front")
    if chosen is not None:
        ax.scatter([chosen.energy.totals.energy_fj], [min(chosen.quality(metric_id), cap * 1.05)],
                   marker="*", s=160, color="tab:blue", zorder=5, label="chosen design")
    ax.set_xlabel("design energy [fJ]")
    ax.set_ylabel(metric_id)
    ax.set_title("energy vs. quality of evaluated designs")
    ax.grid(alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_FIG_DPI)
    plt.close(fig)


def write_stage_outputs_csv(path: Path, x: Signal, out: PipelineOutput) -> None:
    n = len(x)
    cols = [
        np.arange(n),
        x.samples,
        out.lpf_out.samples,
        out.hpf_out.samples,
        out.diff_out.samples,
        out.sqr_out.samples,
        out.mwi_out.samples,
    ]
    rows = [[int(c[i]) for c in cols] for i in range(n)]
    write_csv(path, ["n", "input", "lpf", "hpf", "diff", "sqr", "mwi"], rows)


def render_run_figure(path: Path, x: Signal, out: PipelineOutput, truth=None) -> None:
    traces = [
        ("input", x.samples),
        ("lpf", out.lpf_out.samples),
        ("hpf", out.hpf_out.samples),
        ("diff", out.diff_out.samples),
        ("sqr", out.sqr_out.samples),
        ("mwi", out.mwi_out.samples),
    ]
    fig, axes = plt.subplots(len(traces), 1, figsize=(7.2, 9.0), sharex=True)
    for ax, (name, samples) in zip(axes, traces):
        ax.plot(samples, lw=0.7, color="tab:blue")
        ax.set_ylabel(name, fontsize=8)
        ax.grid(alpha=0.25)
    if len(out.detected_peaks):
        axes[0].plot(out.detected_peaks, x.samples[np.clip(out.detected_peaks, 0, len(x) - 1)],
                     "v", color="tab:red", ms=5, label="detected")
    if truth is not None and len(truth):
        axes[0].plot(truth, x.samples[np.clip(truth, 0, len(x) - 1)],
                     "^", color="tab:green", ms=4, label="truth")
    axes[0].legend(loc="upper right", fontsize=7)
    axes[-1].set_xlabel("sample")
    fig.tight_layout()
    fig.savefig(path, dpi=_FIG_DPI)
    plt.close(fig)
