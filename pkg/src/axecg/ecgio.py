"""ECG record ingestion (packed 212 binary, CSV) and synthetic generation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError, UnsupportedFormatError

DEFAULT_FS = 200.0
DEFAULT_ADC_BITS = 16


@dataclass
class Signal:
    """Integer sample sequence with its sampling metadata."""

    samples: np.ndarray
    fs: float = DEFAULT_FS
    adc_bits: int = DEFAULT_ADC_BITS

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.int64)
        if self.fs <= 0:
            raise ValueError("sampling rate must be positive")
        lim = 1 << (self.adc_bits - 1)
        if self.samples.size and (self.samples.min() < -lim or self.samples.max() >= lim):
            raise ValueError(f"samples exceed the declared {self.adc_bits}-bit range")

    def __len__(self) -> int:
        return len(self.samples)

    def promoted(self, adc_bits: int = DEFAULT_ADC_BITS) -> "Signal":
        """Left-shift samples to a wider full scale (e.g. 12 -> 16 bit)."""
        if adc_bits < self.adc_bits:
            raise ValueError("cannot promote to fewer bits")
        shift = adc_bits - self.adc_bits
        return Signal(self.samples << shift, self.fs, adc_bits)


@dataclass
class BeatTruth:
    """Ground-truth R-peak sample indices, strictly increasing."""

    indices: np.ndarray
    fs: float = DEFAULT_FS

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        if self.indices.size:
            gaps = np.diff(self.indices)
            if (gaps <= 0).any():
                raise ValueError("beat indices must be strictly increasing")
            if (gaps < 0.2 * self.fs).any():
                raise ValueError("beats closer than the 0.2 s refractory interval")

    def __len__(self) -> int:
        return len(self.indices)


def decode_frames_212(data: bytes) -> np.ndarray:
    """Unpack 3-byte groups into pairs of 12-bit two's-complement samples."""
    if len(data) % 3:
        raise ParseError(f"packed-212 stream length {len(data)} is not a multiple of 3")
    raw = np.frombuffer(data, dtype=np.uint8).astype(np.int64).reshape(-1, 3)
    s0 = raw[:, 0] | ((raw[:, 1] & 0x0F) << 8)
    s1 = raw[:, 2] | ((raw[:, 1] >> 4) << 8)
    out = np.empty(2 * len(raw), dtype=np.int64)
    out[0::2] = s0
    out[1::2] = s1
    out[out >= 2048] -= 4096
    return out


def encode_frames_212(samples) -> bytes:
    """Inverse of :func:`decode_frames_212`; sample count must be even."""
    arr = np.asarray(samples, dtype=np.int64)
    if arr.size % 2:
        raise ValueError("packed-212 encoding needs an even sample count")
    if arr.size and (arr.min() < -2048 or arr.max() > 2047):
        raise ValueError("samples exceed the 12-bit range")
    u = np.where(arr < 0, arr + 4096, arr)
    s0 = u[0::2]
    s1 = u[1::2]
    out = np.empty((len(s0), 3), dtype=np.uint8)
    out[:, 0] = s0 & 0xFF
    out[:, 1] = ((s1 >> 8) << 4) | (s0 >> 8)
    out[:, 2] = s1 & 0xFF
    return out.tobytes()


def _parse_header_212(header: str) -> tuple[int, float, int]:
    """Minimal header subset: record line + per-signal format tokens."""
    lines = [ln.strip() for ln in header.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty record header")
    fields = lines[0].split()
    if len(fields) < 3:
        raise ParseError("record line must carry name, signal count and sampling rate")
    try:
        n_signals = int(fields[1])
        fs = float(fields[2].split("/")[0])
    except ValueError as exc:
        raise ParseError(f"bad record line {lines[0]!r}") from exc
    n_samples = 0
    if len(fields) >= 4:
        try:
            n_samples = int(fields[3])
        except ValueError as exc:
            raise ParseError(f"bad sample count in record line {lines[0]!r}") from exc
    if len(lines) - 1 < n_signals:
        raise ParseError(f"header declares {n_signals} signals but lists {len(lines) - 1}")
    for ln in lines[1 : 1 + n_signals]:
        tokens = ln.split()
        if len(tokens) < 2:
            raise ParseError(f"bad signal line {ln!r}")
        fmt = tokens[1].split("x")[0].split(":")[0].split("+")[0]
        if fmt != "212":
            raise UnsupportedFormatError(f"unsupported signal storage format {tokens[1]!r} (only 212)")
    return n_signals, fs, n_samples


def read_wfdb212(header: str, data: bytes, channel: int = 0) -> Signal:
    """Decode one channel of a packed-212 record (header text + .dat bytes)."""
    n_signals, fs, n_samples = _parse_header_212(header)
    if not 0 <= channel < n_signals:
        raise ParseError(f"channel {channel} out of range for {n_signals} signals")
    flat = decode_frames_212(data)
    chan = flat[channel::n_signals]
    if n_samples:
        if len(chan) < n_samples:
            raise ParseError(f"data stream truncated: {len(chan)} < declared {n_samples} samples")
        chan = chan[:n_samples]
    return Signal(chan, fs=fs, adc_bits=12)


def read_csv(text: str) -> Signal:
    """One integer sample per line; optional leading ``fs=<Hz>`` line."""
    fs = DEFAULT_FS
    samples = []
    lines = text.splitlines()
    start = 0
    if lines and lines[0].strip().startswith("fs="):
        try:
            fs = float(lines[0].strip()[3:])
        except ValueError as exc:
            raise ParseError(f"bad sampling-rate header {lines[0]!r}") from exc
        start = 1
    for lineno, line in enumerate(lines[start:], start=start + 1):
        token = line.strip().replace("−", "-")
        if not token:
            continue
        try:
            samples.append(int(token))
        except ValueError:
            raise ParseError(f"non-numeric sample on line {lineno}: {line!r}") from None
    return Signal(np.array(samples, dtype=np.int64), fs=fs, adc_bits=DEFAULT_ADC_BITS)


def write_csv(sig: Signal) -> str:
    body = "\n".join(str(int(v)) for v in sig.samples)
    return f"fs={sig.fs:g}\n{body}\n" if len(sig) else f"fs={sig.fs:g}\n"


# Synthetic morphology: Gaussian bumps per beat at (offset s, amplitude rel. R, width s).
# Chosen for a clean, strongly peaked QRS so that detection is well posed.
_BUMPS = (
    (-0.16, 0.13, 0.022),   # P
    (-0.022, -0.12, 0.008),  # Q
    (0.0, 1.0, 0.0105),      # R
    (0.024, -0.23, 0.009),   # S
    (0.28, 0.30, 0.055),     # T
)
_R_AMPLITUDE = 19500
_FIRST_BEAT_S = 0.35
_END_MARGIN_S = 0.45


def synth_ecg(
    duration_s: float,
    heart_rate_bpm: float,
    noise_amplitude: float = 0.0,
    seed: int = 0,
    amplitude: float = 1.0,
) -> tuple[Signal, BeatTruth]:
    """Generate a deterministic synthetic ECG with known R-peak indices.

    ``noise_amplitude`` is the half-range of seeded uniform noise as a
    fraction of the R amplitude.  ``amplitude`` scales the whole morphology;
    values that would clip are clamped to the 16-bit range.
    """
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    if not 30 <= heart_rate_bpm <= 220:
        raise ValueError("heart rate must be within [30, 220] bpm")
    if noise_amplitude < 0:
        raise ValueError("noise amplitude must be >= 0")
    fs = DEFAULT_FS
    n = int(round(duration_s * fs))
    step = 60.0 / heart_rate_bpm * fs
    first = int(round(_FIRST_BEAT_S * fs))
    last_ok = n - int(round(_END_MARGIN_S * fs))
    r_indices = []
    i = 0
    while True:
        r = first + int(round(i * step))
        if r > last_ok:
            break
        r_indices.append(r)
        i += 1

    t = np.arange(n, dtype=np.float64)
    wave = np.zeros(n, dtype=np.float64)
    for r in r_indices:
        for off_s, rel_amp, width_s in _BUMPS:
            center = r + off_s * fs
            sigma = width_s * fs
            lo = max(0, int(center - 6 * sigma))
            hi = min(n, int(center + 6 * sigma) + 1)
            if lo >= hi:
                continue
            seg = t[lo:hi]
            wave[lo:hi] += rel_amp * np.exp(-0.5 * ((seg - center) / sigma) ** 2)

    scale = amplitude * _R_AMPLITUDE
    wave *= scale
    if noise_amplitude > 0:
        rng = np.random.default_rng(seed)
        wave += rng.uniform(-noise_amplitude * scale, noise_amplitude * scale, size=n)
    samples = np.clip(np.rint(wave), -32768, 32767).astype(np.int64)
    return Signal(samples, fs=fs, adc_bits=DEFAULT_ADC_BITS), BeatTruth(np.array(r_indices, dtype=np.int64), fs=fs)
