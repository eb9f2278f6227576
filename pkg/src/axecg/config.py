"""Experiment configuration: one JSON file describing input, library, search
space, constraints and output conventions.

Validation reports the offending field by name; file references are checked
at load time.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .stages import STAGE_DEFS, Design

SEARCH_MODES = ("sweep", "generate", "exhaustive", "heuristic")
INPUT_KINDS = ("synthetic", "csv", "wfdb")
_PRE_STAGES = ("LPF", "HPF")
_PROC_STAGES = ("DIFF", "SQR", "MWI")


@dataclass
class InputSpec:
    kind: str = "synthetic"
    duration_s: float = 30.0
    heart_rate_bpm: float = 60.0
    noise_amplitude: float = 0.0
    amplitude: float = 1.0
    path: str | None = None          # csv file
    header_path: str | None = None   # wfdb header
    data_path: str | None = None     # wfdb .dat
    channel: int = 0
    promote_to_16bit: bool = False


@dataclass
class ConstraintSpec:
    metric_id: str
    threshold: float


@dataclass
class SearchSpec:
    mode: str = "sweep"
    stages: list[str] = field(default_factory=lambda: list(STAGE_DEFS))
    k_levels: dict[str, list[int]] = field(default_factory=dict)
    adders: list[str] = field(default_factory=lambda: ["ApproxAdd5"])
    mults: list[str] = field(default_factory=lambda: ["AppMultV1"])


@dataclass
class ExperimentConfig:
    input: InputSpec
    search: SearchSpec
    constraints: dict[str, ConstraintSpec]
    design: Design | None
    library_path: str | None
    seed: int
    out_dir: str
    raw: dict

    def config_hash(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def constraint_for(self, stage_ids: list[str]) -> ConstraintSpec:
        group = "preprocessing" if set(stage_ids) <= set(_PRE_STAGES) else "processing"
        return self.constraints[group]


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def default_k_levels(stage_ids, step: int = 2) -> dict[str, list[int]]:
    return {sid: list(range(0, STAGE_DEFS[sid].max_k + 1, step)) for sid in stage_ids}


def _parse_input(doc: dict, base: Path) -> InputSpec:
    kind = doc.get("kind", "synthetic")
    _require(kind in INPUT_KINDS, f"input.kind must be one of {INPUT_KINDS}, got {kind!r}")
    spec = InputSpec(
        kind=kind,
        duration_s=float(doc.get("duration_s", 30.0)),
        heart_rate_bpm=float(doc.get("heart_rate_bpm", 60.0)),
        noise_amplitude=float(doc.get("noise_amplitude", 0.0)),
        amplitude=float(doc.get("amplitude", 1.0)),
        path=doc.get("path"),
        header_path=doc.get("header_path"),
        data_path=doc.get("data_path"),
        channel=int(doc.get("channel", 0)),
        promote_to_16bit=bool(doc.get("promote_to_16bit", False)),
    )
    if kind == "synthetic":
        _require(spec.duration_s > 0, "input.duration_s must be positive")
        _require(30 <= spec.heart_rate_bpm <= 220, "input.heart_rate_bpm must be in [30, 220]")
        _require(spec.noise_amplitude >= 0, "input.noise_amplitude must be >= 0")
    elif kind == "csv":
        _require(spec.path is not None, "input.path is required for csv input")
        resolved = base / spec.path
        _require(resolved.exists(), f"input.path does not exist: {spec.path}")
        spec.path = str(resolved)
    else:
        _require(spec.header_path is not None and spec.data_path is not None,
                 "input.header_path and input.data_path are required for wfdb input")
        for fld in ("header_path", "data_path"):
            resolved = base / getattr(spec, fld)
            _require(resolved.exists(), f"input.{fld} does not exist: {getattr(spec, fld)}")
            setattr(spec, fld, str(resolved))
        _require(spec.channel >= 0, "input.channel must be >= 0")
    return spec


def _parse_search(doc: dict) -> SearchSpec:
    mode = doc.get("mode", "sweep")
    _require(mode in SEARCH_MODES, f"search.mode must be one of {SEARCH_MODES}, got {mode!r}")
    stages = list(doc.get("stages", list(STAGE_DEFS)))
    for sid in stages:
        _require(sid in STAGE_DEFS, f"search.stages contains unknown stage {sid!r}")
    _require(len(stages) == len(set(stages)), "search.stages has duplicates")
    raw_levels = doc.get("k_levels", {})
    step = int(doc.get("k_step", 2))
    _require(step >= 1, "search.k_step must be >= 1")
    k_levels = default_k_levels(stages, step)
    for sid, levels in raw_levels.items():
        _require(sid in STAGE_DEFS, f"search.k_levels references unknown stage {sid!r}")
        lv = [int(k) for k in levels]
        _require(len(lv) > 0, f"search.k_levels.{sid} must be nonempty")
        for k in lv:
            _require(0 <= k <= STAGE_DEFS[sid].max_k,
                     f"search.k_levels.{sid}: {k} exceeds the stage maximum {STAGE_DEFS[sid].max_k}")
        k_levels[sid] = lv
    adders = list(doc.get("adders", ["ApproxAdd5"]))
    mults = list(doc.get("mults", ["AppMultV1"]))
    _require(len(adders) > 0 and len(mults) > 0, "search.adders and search.mults must be nonempty")
    return SearchSpec(mode=mode, stages=stages, k_levels={sid: k_levels[sid] for sid in stages},
                      adders=adders, mults=mults)


def _parse_constraints(doc: dict) -> dict[str, ConstraintSpec]:
    out = {}
    defaults = {"preprocessing": ("PSNR", 15.0), "processing": ("PEAK_ACC", 100.0)}
    for group, (metric, thr) in defaults.items():
        entry = doc.get(group, {})
        metric_id = entry.get("metric", metric)
        _require(metric_id in ("PSNR", "SSIM1D", "PEAK_ACC"),
                 f"constraints.{group}.metric must be PSNR, SSIM1D or PEAK_ACC")
        threshold = float(entry.get("threshold", thr))
        _require(threshold == threshold and abs(threshold) != float("inf"),
                 f"constraints.{group}.threshold must be finite")
        out[group] = ConstraintSpec(metric_id, threshold)
    return out


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file does not exist: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    base = path.parent

    input_spec = _parse_input(raw.get("input", {}), base)
    search = _parse_search(raw.get("search", {}))
    constraints = _parse_constraints(raw.get("constraints", {}))

    design = None
    if "design" in raw:
        design = Design.from_dict(raw["design"])

    library_path = raw.get("library")
    if library_path is not None:
        lp = base / library_path
        _require(lp.exists(), f"library does not exist: {library_path}")
        library_path = str(lp)

    seed = int(raw.get("seed", 0))
    _require(0 <= seed < 2**64, "seed must be an unsigned 64-bit integer")
    out_dir = str(raw.get("out_dir", "out"))
    return ExperimentConfig(
        input=input_spec,
        search=search,
        constraints=constraints,
        design=design,
        library_path=library_path,
        seed=seed,
        out_dir=out_dir,
        raw=raw,
    )
