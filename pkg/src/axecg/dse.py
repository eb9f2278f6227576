"""Design-space exploration: resilience sweeps, three-phase design generation,
exhaustive and heuristic baselines, Pareto extraction.

The three-phase generator works on one group of stages at a time (the
pre-processing filters gated by a signal metric, or the detection stages
gated by peak accuracy):

* Phase 1 orders the stages by their standalone model energy savings
  (ascending), then walks the first stage from the most aggressive corner
  (largest k, cheapest modules) and keeps the first satisfying design.
* Phase 2 walks each following stage from the least aggressive corner and
  appends designs while the constraint holds, stopping at the first
  violation.
* Phase 3 trades approximation diagonally between the previous and current
  stage (-2 / +2 LSBs per step, capped at the stage maximum) and appends the
  satisfying pairs; both stages then commit their lowest-energy pool entry.

Candidate bookkeeping follows that procedure verbatim; the design the run
ultimately reports is the lowest-energy fully evaluated point that satisfies
the constraint, which is always consistent with its logged scores.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ecgio import BeatTruth, Signal
from .energy import EnergyReport, design_cost
from .errors import ConfigError, InfeasibleConstraintError
from .library import ModuleLibrary
from .pipeline import PeakParams, PipelineOutput, run_pipeline
from .quality import peak_accuracy, psnr, ssim1d
from .stages import STAGE_DEFS, Design, StageConfig

_STAGE_OUT_ATTR = {
    "LPF": "lpf_out",
    "HPF": "hpf_out",
    "DIFF": "diff_out",
    "SQR": "sqr_out",
    "MWI": "mwi_out",
}


@dataclass
class DesignPoint:
    """One evaluated design with its quality scores and energy report."""

    design: Design
    pre_psnr: float
    pre_ssim: float
    peak_acc: float
    false_positives: int
    energy: EnergyReport
    seq: int = -1
    phase: str = ""
    wall_s: float = 0.0  # console/progress only; reports serialize seq instead

    def quality(self, metric_id: str) -> float:
        if metric_id == "PSNR":
            return self.pre_psnr
        if metric_id == "SSIM1D":
            return self.pre_ssim
        if metric_id == "PEAK_ACC":
            return self.peak_acc
        raise ValueError(f"unknown metric id {metric_id!r}")


@dataclass
class QualityConstraint:
    metric_id: str
    threshold: float

    def satisfied(self, point: DesignPoint) -> bool:
        return point.quality(self.metric_id) >= self.threshold


@dataclass
class ExplorationLog:
    points: list[DesignPoint] = field(default_factory=list)

    def append(self, point: DesignPoint) -> None:
        self.points.append(point)

    @property
    def count(self) -> int:
        return len(self.points)

    def satisfying(self, constraint: QualityConstraint) -> list[DesignPoint]:
        return [p for p in self.points if constraint.satisfied(p)]


class DesignEvaluator:
    """Scores candidate designs against the accurate reference run.

    The reference pipeline is evaluated once; each candidate is compared on
    the post-HPF signal (PSNR, structural similarity) and on final peak
    accuracy against either the provided ground truth or, for records without
    annotations, the accurate design's own detections.
    """

    def __init__(
        self,
        signal: Signal,
        lib: ModuleLibrary,
        truth: BeatTruth | None = None,
        peak_params: PeakParams | None = None,
        tol_samples: int = 10,
    ):
        self.signal = signal
        self.lib = lib
        self.peak_params = peak_params
        self.tol_samples = tol_samples
        ref = run_pipeline(signal, Design.accurate(), lib, peak_params)
        self._ref_hpf = ref.hpf_out.samples
        self.truth_indices = truth.indices if truth is not None else ref.detected_peaks
        self._count = 0

    @property
    def count(self) -> int:
        return self._count

    def evaluate(self, design: Design, phase: str = "") -> DesignPoint:
        t0 = time.perf_counter()
        out = run_pipeline(self.signal, design, self.lib, self.peak_params)
        wall = time.perf_counter() - t0
        point = self._score(design, out, wall)
        point.seq = self._count
        point.phase = phase
        self._count += 1
        return point

    def _score(self, design: Design, out: PipelineOutput, wall: float) -> DesignPoint:
        pre_psnr = psnr(self._ref_hpf, out.hpf_out.samples)
        pre_ssim = ssim1d(self._ref_hpf, out.hpf_out.samples)
        match = peak_accuracy(self.truth_indices, out.detected_peaks, self.tol_samples)
        report = design_cost(design, self.lib)
        snapshot = Design(dict(design.stages))
        return DesignPoint(snapshot, pre_psnr, pre_ssim, match.accuracy, match.false_positives, report, wall_s=wall)


@dataclass
class SweepRow:
    k: int
    psnr: float
    ssim: float
    peak_acc: float
    energy_reduction: float


def resilience_sweep(
    stage_id: str,
    lsb_list: list[int],
    adder_spec: str,
    mult_spec: str,
    signal: Signal,
    lib: ModuleLibrary,
    truth: BeatTruth | None = None,
    peak_params: PeakParams | None = None,
) -> list[SweepRow]:
    """Approximate one stage at a time and record quality and energy per k.

    Quality columns compare the swept stage's own output against the accurate
    reference (that is where its error first appears); peak accuracy is end to
    end.  The energy column is the model reduction of the whole design with
    only this stage approximated.
    """
    if stage_id not in STAGE_DEFS:
        raise ConfigError(f"unknown stage id {stage_id!r}")
    attr = _STAGE_OUT_ATTR[stage_id]
    ref = run_pipeline(signal, Design.accurate(), lib, peak_params)
    ref_out = getattr(ref, attr).samples
    truth_indices = truth.indices if truth is not None else ref.detected_peaks
    rows = []
    for k in lsb_list:
        cfg = StageConfig(stage_id, k, adder_spec, mult_spec)
        design = Design.accurate().replaced(cfg)
        out = run_pipeline(signal, design, lib, peak_params)
        test = getattr(out, attr).samples
        match = peak_accuracy(truth_indices, out.detected_peaks)
        rows.append(
            SweepRow(
                k=k,
                psnr=psnr(ref_out, test),
                ssim=ssim1d(ref_out, test),
                peak_acc=match.accuracy,
                energy_reduction=design_cost(design, lib).reduction,
            )
        )
    return rows


@dataclass
class SearchSpace:
    """Grid of per-stage approximation degrees with global module choices."""

    stage_ids: list[str]
    k_levels: dict[str, list[int]]
    adders: list[str]
    mults: list[str]

    def __post_init__(self):
        if not self.stage_ids:
            raise ConfigError("search space needs at least one stage")
        for sid in self.stage_ids:
            if sid not in STAGE_DEFS:
                raise ConfigError(f"unknown stage id {sid!r}")
            levels = self.k_levels.get(sid)
            if not levels:
                raise ConfigError(f"stage {sid} has no LSB levels")
            if any(not 0 <= k <= STAGE_DEFS[sid].max_k for k in levels):
                raise ConfigError(f"stage {sid} LSB levels exceed the stage maximum {STAGE_DEFS[sid].max_k}")
        if not self.adders or not self.mults:
            raise ConfigError("search space needs at least one adder and one multiplier spec")

    def size(self) -> int:
        n = len(self.adders) * len(self.mults)
        for sid in self.stage_ids:
            n *= len(self.k_levels[sid])
        return n

    def heuristic_subspace(self) -> "SearchSpace":
        """Constrain LSB levels to multiples of 2 (modules are already global)."""
        levels = {sid: [k for k in self.k_levels[sid] if k % 2 == 0] for sid in self.stage_ids}
        return SearchSpace(list(self.stage_ids), levels, list(self.adders), list(self.mults))


def _grid(space: SearchSpace, base: Design):
    for adder, mult in itertools.product(space.adders, space.mults):
        for combo in itertools.product(*(space.k_levels[sid] for sid in space.stage_ids)):
            cfgs = [StageConfig(sid, k, adder, mult) for sid, k in zip(space.stage_ids, combo)]
            yield base.replaced(*cfgs)


_WORKER_STATE: dict = {}


def _worker_init(evaluator: DesignEvaluator):
    _WORKER_STATE["evaluator"] = evaluator


def _worker_eval(args):
    design, phase = args
    return _WORKER_STATE["evaluator"].evaluate(design, phase)


def _run_grid(designs, evaluator: DesignEvaluator, phase: str, jobs: int) -> ExplorationLog:
    log = ExplorationLog()
    designs = list(designs)
    if jobs <= 1:
        for design in designs:
            log.append(evaluator.evaluate(design, phase))
        return log
    with ProcessPoolExecutor(max_workers=jobs, initializer=_worker_init, initargs=(evaluator,)) as pool:
        for seq, point in enumerate(pool.map(_worker_eval, ((d, phase) for d in designs), chunksize=4)):
            point.seq = seq
            log.append(point)
            evaluator._count += 1
    return log


def exhaustive_search(
    space: SearchSpace,
    evaluator: DesignEvaluator,
    base_design: Design | None = None,
    jobs: int = 1,
) -> ExplorationLog:
    """Evaluate every combination in the space; log in grid order."""
    base = base_design or Design.accurate()
    return _run_grid(_grid(space, base), evaluator, "exhaustive", jobs)


def heuristic_search(
    space: SearchSpace,
    evaluator: DesignEvaluator,
    base_design: Design | None = None,
    jobs: int = 1,
) -> ExplorationLog:
    """Exhaustive over the constrained space: global modules, even LSB counts."""
    base = base_design or Design.accurate()
    return _run_grid(_grid(space.heuristic_subspace(), base), evaluator, "heuristic", jobs)


def standalone_savings(space: SearchSpace, lib: ModuleLibrary, base_design: Design | None = None) -> dict[str, float]:
    """Model energy reduction with only one stage at its most aggressive level."""
    base = base_design or Design.accurate()
    out = {}
    for sid in space.stage_ids:
        k_max = max(space.k_levels[sid])
        cfg = StageConfig(sid, k_max, space.adders[0], space.mults[0])
        out[sid] = design_cost(base.replaced(cfg), lib).reduction
    return out


def _chosen_point(log: ExplorationLog, constraint: QualityConstraint) -> DesignPoint:
    good = log.satisfying(constraint)
    if not good:
        raise InfeasibleConstraintError("<all>", "no evaluated design satisfies the quality constraint")
    return min(good, key=lambda p: (p.energy.totals.energy_fj, p.design.key()))


@dataclass
class GenerateResult:
    stage_architectures: dict[str, StageConfig]
    chosen: DesignPoint
    log: ExplorationLog


def generate_designs(
    space: SearchSpace,
    evaluator: DesignEvaluator,
    constraint: QualityConstraint,
    base_design: Design | None = None,
    energy_savings: dict[str, float] | None = None,
) -> GenerateResult:
    """Three-phase design generation over one stage group.

    ``base_design`` carries stages committed by earlier runs (for example the
    pre-processing architecture while exploring the detection stages); they
    stay fixed in every evaluation here.
    """
    base = base_design or Design.accurate()
    lib = evaluator.lib
    savings = energy_savings or standalone_savings(space, lib, base)
    order = sorted(space.stage_ids, key=lambda sid: savings.get(sid, 1.0))
    lsb_desc = {sid: sorted(space.k_levels[sid], reverse=True) for sid in order}
    log = ExplorationLog()
    committed: dict[str, StageConfig] = {}

    def evaluate(cfgs: list[StageConfig], phase: str) -> DesignPoint:
        overlay = [cfg for sid, cfg in committed.items() if all(c.stage_id != sid for c in cfgs)]
        point = evaluator.evaluate(base.replaced(*overlay, *cfgs), phase)
        log.append(point)
        return point

    # Phase 1: first stage, most aggressive corner first, keep first satisfier.
    first = order[0]
    stage1_pool: list[tuple[StageConfig, DesignPoint]] = []
    for k, mult, adder in itertools.product(lsb_desc[first], space.mults, space.adders):
        cfg = StageConfig(first, k, adder, mult)
        point = evaluate([cfg], "phase1")
        if constraint.satisfied(point):
            stage1_pool.append((cfg, point))
            break
    if not stage1_pool:
        raise InfeasibleConstraintError(first)
    committed[first] = stage1_pool[0][0]

    for i in range(1, len(order)):
        prev, cur = order[i - 1], order[i]
        stage2_pool: list[tuple[StageConfig, DesignPoint]] = []

        # Phase 2: current stage from the least aggressive corner, stop at
        # the first violation.
        for k, mult, adder in itertools.product(
            reversed(lsb_desc[cur]), reversed(space.mults), reversed(space.adders)
        ):
            cfg = StageConfig(cur, k, adder, mult)
            point = evaluate([cfg], "phase2")
            if not constraint.satisfied(point):
                break
            stage2_pool.append((cfg, point))
        if not stage2_pool:
            raise InfeasibleConstraintError(cur)

        # Phase 3: diagonal trade between prev (-2 per step) and cur (+2,
        # capped), down to zero approximation on prev.
        k_prev = committed[prev].k_approx
        k_cur = max(cfg.k_approx for cfg, _ in stage2_pool)
        step = 1
        while k_prev - 2 * step >= 0:
            k1 = k_prev - 2 * step
            k2 = min(k_cur + 2 * step, STAGE_DEFS[cur].max_k)
            for mult, adder in itertools.product(space.mults, space.adders):
                cfg1 = StageConfig(prev, k1, adder, mult)
                cfg2 = StageConfig(cur, k2, adder, mult)
                point = evaluate([cfg1, cfg2], "phase3")
                if constraint.satisfied(point):
                    stage1_pool.append((cfg1, point))
                    stage2_pool.append((cfg2, point))
            step += 1

        # Commit both stages from the lowest-energy satisfying context.  The
        # per-stage pool minima can combine into a pair that was never
        # evaluated together (and may violate the constraint), so the commit
        # always takes one evaluated point; the next stage then starts from a
        # baseline that is known to satisfy.
        best = min((pt for _, pt in stage2_pool),
                   key=lambda p: (p.energy.totals.energy_fj, p.design.key()))
        committed[cur] = best.design[cur]
        committed[prev] = best.design[prev]
        stage1_pool = stage2_pool

    return GenerateResult(committed, _chosen_point(log, constraint), log)


def pareto_indices(quality: np.ndarray, energy: np.ndarray) -> list[int]:
    """Indices of the non-dominated set (maximize quality, minimize energy),
    ordered by energy ascending with stable original-order ties."""
    q = np.asarray(quality, dtype=np.float64)
    e = np.asarray(energy, dtype=np.float64)
    if q.shape != e.shape:
        raise ValueError("quality and energy must have equal length")
    n = len(q)
    keep = []
    for i in range(n):
        better_e = (e < e[i]) & (q >= q[i])
        better_q = (e <= e[i]) & (q > q[i])
        if not (better_e.any() or better_q.any()):
            keep.append(i)
    keep.sort(key=lambda i: (e[i], i))
    return keep


def pareto_front(points: list[DesignPoint], metric_id: str = "PEAK_ACC") -> list[DesignPoint]:
    quality = np.array([p.quality(metric_id) for p in points])
    energy = np.array([p.energy.totals.energy_fj for p in points])
    finite = np.where(np.isfinite(quality), quality, np.finfo(np.float64).max)
    return [points[i] for i in pareto_indices(finite, energy)]
