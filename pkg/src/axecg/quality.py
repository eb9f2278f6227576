"""Signal-quality and application-quality metrics.

PSNR and the windowed 1-D structural-similarity score gate the pre-processing
signal; peak-detection accuracy gates the application output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MetricUndefinedError

METRIC_IDS = ("PSNR", "SSIM1D", "PEAK_ACC")


@dataclass
class QualityScore:
    metric_id: str
    value: float

    def __post_init__(self):
        if self.metric_id not in METRIC_IDS:
            raise ValueError(f"unknown metric id {self.metric_id!r}")


def _check_pair(ref, test):
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise ValueError(f"signal lengths differ: {ref.shape} vs {test.shape}")
    if ref.size == 0:
        raise ValueError("signals must be nonempty")
    return ref, test


def psnr(ref, test) -> float:
    """Peak signal-to-noise ratio in dB against the reference's observed range.

    Args:
        ref: reference samples (defines the dynamic range L = max - min).
        test: samples under evaluation, same length.

    Returns:
        10*log10(L^2 / MSE); +inf when the signals are identical.

    Raises:
        ValueError: length mismatch or empty input.
        MetricUndefinedError: constant reference (L = 0).
    """
    ref, test = _check_pair(ref, test)
    span = float(ref.max() - ref.min())
    if span == 0.0:
        raise MetricUndefinedError("PSNR is undefined for a constant reference signal")
    mse = float(np.mean((ref - test) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(span * span / mse)


def ssim1d(ref, test, window: int = 8) -> float:
    """Mean structural similarity over sliding windows of a 1-D signal.

    Per window, with L the reference's global dynamic range and the usual
    constants C1 = (0.01 L)^2, C2 = (0.03 L)^2:

        score_w = C1 / ((mu_x - mu_y)^2 + C1)
                  * (2 cov + C2) / (var_x + var_y + C2)

    The luminance factor compares window means through their difference, so
    a common additive offset cancels; the structure factor is the standard
    covariance form.  Result lies in [-1, 1] and equals 1 for identical
    signals.
    """
    ref, test = _check_pair(ref, test)
    if window < 2:
        raise ValueError("window must be >= 2")
    if ref.size < window:
        raise ValueError(f"signals shorter than the {window}-sample window")
    span = float(ref.max() - ref.min())
    if span == 0.0:
        raise MetricUndefinedError("SSIM is undefined for a constant reference signal")
    c1 = (0.01 * span) ** 2
    c2 = (0.03 * span) ** 2

    kernel = np.ones(window) / window
    mu_x = np.convolve(ref, kernel, mode="valid")
    mu_y = np.convolve(test, kernel, mode="valid")
    xx = np.convolve(ref * ref, kernel, mode="valid") - mu_x * mu_x
    yy = np.convolve(test * test, kernel, mode="valid") - mu_y * mu_y
    xy = np.convolve(ref * test, kernel, mode="valid") - mu_x * mu_y

    lum = c1 / ((mu_x - mu_y) ** 2 + c1)
    struct = (2.0 * xy + c2) / (xx + yy + c2)
    return float(np.mean(lum * struct))


@dataclass
class PeakMatch:
    """Greedy one-to-one matching of detections against ground truth."""

    accuracy: float        # percent of truth peaks matched
    matched: int
    truth_count: int
    false_positives: int


def peak_accuracy(truth, detected, tol_samples: int = 10) -> PeakMatch:
    """Match detections to truth peaks within +/- tol_samples, one-to-one.

    Both index lists must be sorted strictly increasing.  With an empty truth
    list the accuracy is vacuously 100 and every detection counts as a false
    positive.
    """
    t = np.asarray(truth, dtype=np.int64)
    d = np.asarray(detected, dtype=np.int64)
    for name, arr in (("truth", t), ("detected", d)):
        if arr.size > 1 and (np.diff(arr) <= 0).any():
            raise ValueError(f"{name} indices must be strictly increasing")
    matched = 0
    i = j = 0
    while i < len(t) and j < len(d):
        delta = int(d[j]) - int(t[i])
        if abs(delta) <= tol_samples:
            matched += 1
            i += 1
            j += 1
        elif delta < 0:
            j += 1
        else:
            i += 1
    accuracy = 100.0 if len(t) == 0 else 100.0 * matched / len(t)
    return PeakMatch(accuracy, matched, len(t), len(d) - matched)
