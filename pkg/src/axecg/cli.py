"""Command-line front end: sweep | explore | run.

Exit codes: 0 success, 1 validation error, 2 infeasible constraint,
3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import report
from .config import ExperimentConfig, load_config
from .dse import (
    DesignEvaluator,
    DesignPoint,
    QualityConstraint,
    SearchSpace,
    exhaustive_search,
    generate_designs,
    heuristic_search,
    pareto_front,
    resilience_sweep,
)
from .ecgio import BeatTruth, Signal, read_csv, read_wfdb212, synth_ecg
from .energy import design_cost
from .errors import ConfigError, InfeasibleConstraintError, ParseError
from .library import ModuleLibrary, load_library
from .pipeline import run_pipeline
from .quality import peak_accuracy, psnr, ssim1d
from .stages import Design

_PRE_STAGES = ("LPF", "HPF")


def _load_input(cfg: ExperimentConfig, seed: int) -> tuple[Signal, BeatTruth | None]:
    spec = cfg.input
    if spec.kind == "synthetic":
        return synth_ecg(spec.duration_s, spec.heart_rate_bpm, spec.noise_amplitude, seed,
                         amplitude=spec.amplitude)
    if spec.kind == "csv":
        sig = read_csv(Path(spec.path).read_text())
        return sig, None
    header = Path(spec.header_path).read_text()
    data = Path(spec.data_path).read_bytes()
    sig = read_wfdb212(header, data, spec.channel)
    if spec.promote_to_16bit:
        sig = sig.promoted(16)
    return sig, None


def _constraints_for(cfg: ExperimentConfig, stage_ids) -> list[QualityConstraint]:
    groups = set()
    for sid in stage_ids:
        groups.add("preprocessing" if sid in _PRE_STAGES else "processing")
    return [QualityConstraint(cfg.constraints[g].metric_id, cfg.constraints[g].threshold)
            for g in sorted(groups)]


def _satisfies_all(point: DesignPoint, constraints: list[QualityConstraint]) -> bool:
    return all(c.satisfied(point) for c in constraints)


def cmd_sweep(cfg: ExperimentConfig, lib: ModuleLibrary, out_dir: Path, seed: int, jobs: int) -> int:
    signal, truth = _load_input(cfg, seed)
    search = cfg.search
    summary = {"command": "sweep", "config_hash": cfg.config_hash(), "seed": seed, "stages": {}}
    for sid in search.stages:
        rows = resilience_sweep(sid, search.k_levels[sid], search.adders[0], search.mults[0],
                                signal, lib, truth)
        report.write_sweep_csv(out_dir / f"sweep_{sid}.csv", rows)
        report.render_sweep_figure(out_dir / f"sweep_{sid}.png", sid, rows)
        summary["stages"][sid] = {
            "rows": len(rows),
            "max_reduction": max(r.energy_reduction for r in rows),
            "min_peak_acc": min(r.peak_acc for r in rows),
        }
        print(f"sweep {sid}: {len(rows)} rows, max reduction "
              f"{summary['stages'][sid]['max_reduction']:.2f}x")
    report.write_json(out_dir / "summary.json", summary)
    return 0


def _explore_generate(cfg: ExperimentConfig, evaluator: DesignEvaluator):
    """Two-gate flow: pre-processing stages first, detection stages on top."""
    search = cfg.search
    pre = [s for s in search.stages if s in _PRE_STAGES]
    proc = [s for s in search.stages if s not in _PRE_STAGES]
    runs = []
    base = Design.accurate()
    chosen = None
    for label, group in (("preprocessing", pre), ("processing", proc)):
        if not group:
            continue
        space = SearchSpace(group, {sid: search.k_levels[sid] for sid in group},
                            list(search.adders), list(search.mults))
        spec = cfg.constraints[label]
        constraint = QualityConstraint(spec.metric_id, spec.threshold)
        result = generate_designs(space, evaluator, constraint, base_design=base)
        runs.append((label, result, constraint))
        base = base.replaced(*(result.chosen.design[sid] for sid in group))
        chosen = result.chosen
    return runs, chosen


def cmd_explore(cfg: ExperimentConfig, lib: ModuleLibrary, out_dir: Path, seed: int, jobs: int) -> int:
    signal, truth = _load_input(cfg, seed)
    evaluator = DesignEvaluator(signal, lib, truth)
    search = cfg.search
    summary = {"command": "explore", "mode": search.mode, "config_hash": cfg.config_hash(), "seed": seed}
    csv_runs = []
    all_points: list[DesignPoint] = []

    if search.mode == "generate":
        runs, chosen = _explore_generate(cfg, evaluator)
        for label, result, constraint in runs:
            flags = [constraint.satisfied(p) for p in result.log.points]
            csv_runs.append((label, result.log.points, flags))
            all_points.extend(result.log.points)
            summary[f"{label}_evaluations"] = result.log.count
            summary[f"{label}_satisfying"] = sum(flags)
            summary[f"{label}_architectures"] = {
                sid: arch.to_dict() for sid, arch in result.stage_architectures.items()
            }
    else:
        space = SearchSpace(search.stages, dict(search.k_levels), list(search.adders), list(search.mults))
        run_fn = exhaustive_search if search.mode == "exhaustive" else heuristic_search
        log = run_fn(space, evaluator, jobs=jobs)
        constraints = _constraints_for(cfg, search.stages)
        flags = [_satisfies_all(p, constraints) for p in log.points]
        csv_runs.append((search.mode, log.points, flags))
        all_points.extend(log.points)
        good = [p for p, ok in zip(log.points, flags) if ok]
        if not good:
            raise InfeasibleConstraintError("<all>", "no evaluated design satisfies the quality constraints")
        chosen = min(good, key=lambda p: (p.energy.totals.energy_fj, p.design.key()))
        summary["evaluations"] = log.count
        summary["satisfying"] = len(good)

    metric = "PEAK_ACC" if any(s not in _PRE_STAGES for s in search.stages) else (
        cfg.constraints["preprocessing"].metric_id)
    front = pareto_front(all_points, metric)
    report.write_exploration_csv(out_dir / "exploration_log.csv", csv_runs)
    report.write_csv(
        out_dir / "pareto.csv",
        ["seq", "quality_" + metric.lower(), "energy_fj", "reduction"],
        [[p.seq, p.quality(metric), p.energy.totals.energy_fj, p.energy.reduction] for p in front],
    )
    report.render_explore_figure(out_dir / "explore.png", all_points, front, metric, chosen)
    report.write_json(out_dir / "chosen_design.json", {
        "config_hash": cfg.config_hash(),
        "seed": seed,
        "design": chosen.design.to_dict(),
        "scores": {"psnr": chosen.pre_psnr, "ssim": chosen.pre_ssim, "peak_acc": chosen.peak_acc},
        "energy": chosen.energy.to_dict(),
    })
    summary["total_evaluations"] = evaluator.count
    summary["pareto_points"] = len(front)
    summary["chosen_reduction"] = chosen.energy.reduction
    report.write_json(out_dir / "summary.json", summary)
    print(f"explore mode={search.mode}: {evaluator.count} evaluations, "
          f"chosen design reduction {chosen.energy.reduction:.2f}x, "
          f"peak accuracy {chosen.peak_acc:.1f}%")
    return 0


def cmd_run(cfg: ExperimentConfig, lib: ModuleLibrary, out_dir: Path, seed: int,
            design_path: str | None) -> int:
    import json

    signal, truth = _load_input(cfg, seed)
    if design_path is not None:
        doc = json.loads(Path(design_path).read_text())
        design = Design.from_dict(doc["design"] if "design" in doc else doc)
    elif cfg.design is not None:
        design = cfg.design
    else:
        raise ConfigError("run needs a design: set config.design or pass --design FILE")

    out = run_pipeline(signal, design, lib)
    ref = run_pipeline(signal, Design.accurate(), lib)
    truth_idx = truth.indices if truth is not None else ref.detected_peaks
    match = peak_accuracy(truth_idx, out.detected_peaks)
    energy = design_cost(design, lib)

    report.write_stage_outputs_csv(out_dir / "stage_outputs.csv", signal, out)
    report.render_run_figure(out_dir / "run.png", signal, out,
                             truth.indices if truth is not None else None)
    metrics = {
        "config_hash": cfg.config_hash(),
        "seed": seed,
        "design": design.to_dict(),
        "psnr_hpf": psnr(ref.hpf_out.samples, out.hpf_out.samples),
        "ssim_hpf": ssim1d(ref.hpf_out.samples, out.hpf_out.samples),
        "peak_acc": match.accuracy,
        "false_positives": match.false_positives,
        "detected_peaks": out.detected_peaks,
        "energy": energy.to_dict(),
    }
    report.write_json(out_dir / "metrics.json", metrics)
    print(f"run: peak accuracy {match.accuracy:.1f}% ({match.matched}/{match.truth_count}), "
          f"energy reduction {energy.reduction:.2f}x")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="axecg",
        description="Approximate-arithmetic energy/quality exploration for ECG QRS detection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("sweep", "per-stage error-resilience tables and figures"),
        ("explore", "design-space exploration (generate | exhaustive | heuristic)"),
        ("run", "run one design through the pipeline and report signals/metrics"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--out", default=None, help="output directory (default: config out_dir)")
        p.add_argument("--seed", type=int, default=None, help="seed override (default: config seed)")
        p.add_argument("--jobs", type=int, default=1, help="parallel evaluation workers")
        if name == "run":
            p.add_argument("--design", default=None, help="design JSON (e.g. chosen_design.json)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        cfg = load_config(args.config)
        lib = load_library(cfg.library_path)
        seed = cfg.seed if args.seed is None else args.seed
        out_dir = Path(args.out if args.out is not None else cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "sweep":
            rc = cmd_sweep(cfg, lib, out_dir, seed, args.jobs)
        elif args.command == "explore":
            rc = cmd_explore(cfg, lib, out_dir, seed, args.jobs)
        else:
            rc = cmd_run(cfg, lib, out_dir, seed, args.design)
    except InfeasibleConstraintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"done in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return rc


if __name__ == "__main__":
    sys.exit(main())
