"""Approximate-arithmetic simulation and energy/quality exploration for ECG QRS detection."""

from .arith import (
    CompositeAdderConfig,
    ErrorStats,
    RecursiveMultConfig,
    characterize,
    eval_composite_adder,
    eval_full_adder,
    eval_mult2x2,
    eval_recursive_mult,
    eval_signed_mult,
)
from .dse import (
    DesignEvaluator,
    DesignPoint,
    ExplorationLog,
    GenerateResult,
    QualityConstraint,
    SearchSpace,
    exhaustive_search,
    generate_designs,
    heuristic_search,
    pareto_front,
    resilience_sweep,
)
from .ecgio import BeatTruth, Signal, read_csv, read_wfdb212, synth_ecg
from .energy import EnergyReport, design_cost, stage_cost, unit_cost
from .errors import (
    ConfigError,
    InfeasibleConstraintError,
    MetricUndefinedError,
    ParseError,
    UnsupportedFormatError,
)
from .library import ACCURATE, CostRecord, FullAdderSpec, ModuleLibrary, Mult2x2Spec, load_library
from .pipeline import PeakParams, PipelineOutput, detect_peaks, run_pipeline
from .quality import PeakMatch, QualityScore, peak_accuracy, psnr, ssim1d
from .stages import Design, StageConfig, STAGE_DEFS

__version__ = "0.1.0"

__all__ = [
    "ACCURATE",
    "BeatTruth",
    "CompositeAdderConfig",
    "ConfigError",
    "CostRecord",
    "Design",
    "DesignEvaluator",
    "DesignPoint",
    "EnergyReport",
    "ErrorStats",
    "ExplorationLog",
    "FullAdderSpec",
    "GenerateResult",
    "InfeasibleConstraintError",
    "MetricUndefinedError",
    "ModuleLibrary",
    "Mult2x2Spec",
    "ParseError",
    "PeakMatch",
    "PeakParams",
    "PipelineOutput",
    "QualityConstraint",
    "QualityScore",
    "RecursiveMultConfig",
    "STAGE_DEFS",
    "SearchSpace",
    "Signal",
    "StageConfig",
    "UnsupportedFormatError",
    "characterize",
    "design_cost",
    "detect_peaks",
    "eval_composite_adder",
    "eval_full_adder",
    "eval_mult2x2",
    "eval_recursive_mult",
    "eval_signed_mult",
    "exhaustive_search",
    "generate_designs",
    "heuristic_search",
    "load_library",
    "pareto_front",
    "peak_accuracy",
    "psnr",
    "read_csv",
    "read_wfdb212",
    "resilience_sweep",
    "run_pipeline",
    "ssim1d",
    "stage_cost",
    "synth_ecg",
    "unit_cost",
]
