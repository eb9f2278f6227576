"""Fixed-point five-stage QRS detection pipeline over composite arithmetic.

Stage chain: LPF -> HPF -> DIFF -> SQR -> MWI, then an adaptive-threshold
peak decision over the MWI output with an HPF alignment check.  Every adder
and multiplier inside a stage is a composite unit from :mod:`axecg.arith`,
configured per stage; k = 0 stages take a plain-integer fast path that is
bit-identical to the cell-level simulation (pinned by tests).

Filter word layout: 16-bit samples, Q15 coefficients, 32-bit two's-complement
accumulation, renormalizing right shift, symmetric output clamp to
[-2^15, 2^15 - 1].  The first (taps - 1) output samples of each FIR are
computed against an implicit all-zero history, so every stage preserves the
input length.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import firwin

from .batchsim import add_batch, add_scalar_fast, signed_mult_batch
from .ecgio import Signal
from .library import ModuleLibrary
from .stages import Design, StageConfig

MASK32 = (1 << 32) - 1
_SIGN32 = 1 << 31
INT16_MIN = -(1 << 15)
INT16_MAX = (1 << 15) - 1

Q15_ONE = 1 << 15

LPF_TAPS_N = 11
LPF_CUTOFF_HZ = 12.0
HPF_TAPS_N = 32
HPF_CUTOFF_HZ = 5.0
HPF_DELTA_TAP = 15
MWI_WINDOW = 32

LPF_DELAY = (LPF_TAPS_N - 1) // 2
HPF_DELAY = HPF_DELTA_TAP
FRONTEND_DELAY = LPF_DELAY + HPF_DELAY


def _q15(h: np.ndarray) -> np.ndarray:
    return np.rint(h * Q15_ONE).astype(np.int64)


def _lowpass_taps() -> np.ndarray:
    q = _q15(firwin(LPF_TAPS_N, LPF_CUTOFF_HZ, fs=200.0))
    q[LPF_TAPS_N // 2] += Q15_ONE - q.sum()  # unity DC gain, exactly
    return q


def _highpass_taps() -> np.ndarray:
    # Spectral inversion of a low-pass prototype: delta at the center tap
    # minus the low-pass response; tap sum forced to exactly zero so DC
    # rejection survives quantization.
    q = -_q15(firwin(HPF_TAPS_N, HPF_CUTOFF_HZ, fs=200.0))
    q[HPF_DELTA_TAP] += Q15_ONE
    q[HPF_DELTA_TAP] -= q.sum()
    return q


LPF_TAPS = _lowpass_taps()
HPF_TAPS = _highpass_taps()


def _to_u32(a):
    return a & MASK32


def _to_s32(u):
    return u - ((u & _SIGN32) << 1)


def _sat16(a):
    return np.clip(a, INT16_MIN, INT16_MAX)


def _history_matrix(x: np.ndarray, taps: int) -> np.ndarray:
    """Rows t = x delayed by t samples, zero warm-up."""
    n = len(x)
    hist = np.zeros((taps, n), dtype=np.int64)
    hist[0] = x
    for t in range(1, taps):
        if t < n:
            hist[t, t:] = x[: n - t]
    return hist


def _mac_fir(x: np.ndarray, coeffs: np.ndarray, cfg: StageConfig, lib: ModuleLibrary) -> np.ndarray:
    """Tap products through the signed multiplier, chained 32-bit accumulation."""
    taps = len(coeffs)
    hist = _history_matrix(x, taps)
    if cfg.unit_k() == 0:
        mags = np.clip(hist, -INT16_MAX, INT16_MAX)  # |-2^15| saturates in the unit
        acc = (coeffs[:, None] * mags).sum(axis=0)
    else:
        mcfg = cfg.mult_config(lib)
        acfg = cfg.adder_config(lib)
        flat_c = np.repeat(coeffs, hist.shape[1])
        prods = signed_mult_batch(mcfg, flat_c, hist.ravel()).reshape(taps, -1)
        acc_u = _to_u32(prods[0])
        for t in range(1, taps):
            acc_u, _ = add_batch(acfg, acc_u, _to_u32(prods[t]))
        acc = _to_s32(acc_u)
    return _sat16(acc >> cfg.stage_def.out_shift)


def run_lpf(x: Signal, cfg: StageConfig, lib: ModuleLibrary) -> Signal:
    assert cfg.stage_id == "LPF"
    return Signal(_mac_fir(x.samples, LPF_TAPS, cfg, lib), fs=x.fs)


def run_hpf(x: Signal, cfg: StageConfig, lib: ModuleLibrary) -> Signal:
    assert cfg.stage_id == "HPF"
    return Signal(_mac_fir(x.samples, HPF_TAPS, cfg, lib), fs=x.fs)


def run_diff(x: Signal, cfg: StageConfig, lib: ModuleLibrary) -> Signal:
    """y(n) = (2x(n) + x(n-1) - x(n-3) - 2x(n-4)) >> 3.

    The times-two terms are composite-adder self-additions and the minus
    terms two's-complement adds, so the stage is adder-only: five instances.
    """
    assert cfg.stage_id == "DIFF"
    s = x.samples
    hist = _history_matrix(s, 5)
    x0, x1, x3, x4 = hist[0], hist[1], hist[3], hist[4]
    if cfg.unit_k() == 0:
        acc = 2 * x0 + x1 - x3 - 2 * x4
    else:
        acfg = cfg.adder_config(lib)
        u0, u1, u3, u4 = (_to_u32(v) for v in (x0, x1, x3, x4))
        t1, _ = add_batch(acfg, u0, u0)
        t2, _ = add_batch(acfg, u4, u4)
        s1, _ = add_batch(acfg, t1, u1)
        s2, _ = add_batch(acfg, s1, _to_u32(~u3), cin=1)
        s3, _ = add_batch(acfg, s2, _to_u32(~t2), cin=1)
        acc = _to_s32(s3)
    return Signal(_sat16(acc >> cfg.stage_def.out_shift), fs=x.fs)


def run_sqr(x: Signal, cfg: StageConfig, lib: ModuleLibrary) -> Signal:
    """Point-by-point square through the single 16x16 multiplier."""
    assert cfg.stage_id == "SQR"
    s = x.samples
    if cfg.unit_k() == 0:
        m = np.minimum(np.abs(s), INT16_MAX)
        p = m * m
    else:
        p = signed_mult_batch(cfg.mult_config(lib), s, s)
    return Signal(_sat16(p >> cfg.stage_def.out_shift), fs=x.fs)


def run_mwi(x: Signal, cfg: StageConfig, lib: ModuleLibrary) -> Signal:
    """32-sample moving sum, renormalized by >> 5; adder-only sliding update."""
    assert cfg.stage_id == "MWI"
    s = x.samples
    n = len(s)
    if cfg.unit_k() == 0:
        c = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(s, out=c[1:])
        lo = np.maximum(np.arange(n) - (MWI_WINDOW - 1), 0)
        acc = c[1:] - c[lo]
    else:
        acfg = cfg.adder_config(lib)
        vals = [int(v) & MASK32 for v in s]
        acc = np.empty(n, dtype=np.int64)
        running = 0
        for i in range(n):
            running = add_scalar_fast(running, vals[i], 0, acfg)
            if i >= MWI_WINDOW:
                running = add_scalar_fast(running, (~vals[i - MWI_WINDOW]) & MASK32, 1, acfg)
            acc[i] = running
        acc = _to_s32(acc)
    return Signal(_sat16(acc >> cfg.stage_def.out_shift), fs=x.fs)


@dataclass
class PeakParams:
    """Decision-rule constants for the adaptive threshold detector."""

    refractory_s: float = 0.2
    align_window_s: float = 0.15
    training_s: float = 2.0
    level_gain: float = 0.125        # running-level update: new = g*peak + (1-g)*old
    threshold_factor: float = 0.25   # thr = npk + factor * (spk - npk)
    latency_samples: int = FRONTEND_DELAY


def _local_maxima(v: np.ndarray) -> np.ndarray:
    if len(v) < 3:
        return np.empty(0, dtype=np.int64)
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])
    return np.nonzero(inner)[0] + 1


def detect_peaks(hpf_out: Signal, mwi_out: Signal, params: PeakParams | None = None) -> np.ndarray:
    """Adaptive-threshold peak decision on the MWI signal.

    A candidate above threshold must line up with a local maximum of the HPF
    signal inside the alignment window, otherwise it is dropped as a
    misclassification.  Reported indices are the aligned HPF maxima shifted
    back by the front-end group delay, with the 0.2 s refractory enforced on
    the output.
    """
    if len(hpf_out) != len(mwi_out):
        raise ValueError("HPF and MWI signals must have equal length")
    p = params or PeakParams()
    fs = mwi_out.fs
    mwi = mwi_out.samples.astype(np.float64)
    hpf = hpf_out.samples
    n = len(mwi)
    refr = max(1, int(round(p.refractory_s * fs)))
    win = max(1, int(round(p.align_window_s * fs)))

    train = mwi[: max(2, int(round(p.training_s * fs)))]
    spk = 0.25 * float(train.max()) if len(train) else 0.0
    npk = 0.5 * float(train.mean()) if len(train) else 0.0
    thr = npk + p.threshold_factor * (spk - npk)

    hpf_max = _local_maxima(hpf)
    reported: list[int] = []
    last_candidate = -refr
    last_reported = -refr
    for m in _local_maxima(mwi):
        if m - last_candidate < refr:
            continue
        if mwi[m] > thr:
            spk = p.level_gain * mwi[m] + (1 - p.level_gain) * spk
            last_candidate = m
            lo, hi = m - win, m + win
            nearby = hpf_max[(hpf_max >= lo) & (hpf_max <= hi)]
            if len(nearby) == 0:
                thr = npk + p.threshold_factor * (spk - npk)
                continue  # no HPF counterpart: omitted
            r_loc = int(nearby[np.argmax(hpf[nearby])])
            r = max(0, r_loc - p.latency_samples)
            if reported and r - last_reported < refr:
                thr = npk + p.threshold_factor * (spk - npk)
                continue
            reported.append(r)
            last_reported = r
        else:
            npk = p.level_gain * mwi[m] + (1 - p.level_gain) * npk
        thr = npk + p.threshold_factor * (spk - npk)
    return np.array(reported, dtype=np.int64)


@dataclass
class PipelineOutput:
    """All stage outputs plus the final peak decisions."""

    lpf_out: Signal
    hpf_out: Signal
    diff_out: Signal
    sqr_out: Signal
    mwi_out: Signal
    detected_peaks: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))


def run_pipeline(
    x: Signal,
    design: Design,
    lib: ModuleLibrary,
    peak_params: PeakParams | None = None,
) -> PipelineOutput:
    """Chain the five stages and run the peak decision."""
    lpf = run_lpf(x, design["LPF"], lib)
    hpf = run_hpf(lpf, design["HPF"], lib)
    diff = run_diff(hpf, design["DIFF"], lib)
    sqr = run_sqr(diff, design["SQR"], lib)
    mwi = run_mwi(sqr, design["MWI"], lib)
    peaks = detect_peaks(hpf, mwi, peak_params)
    return PipelineOutput(lpf, hpf, diff, sqr, mwi, peaks)
