"""Vectorized twins of the scalar unit evaluators.

Same truth tables, same composition rules as :mod:`axecg.arith`, evaluated
over whole numpy arrays at once so that filter stages can run every sample
in parallel.  Two shortcuts keep this fast without changing a single bit:

* cells at and above index k form an exact carry chain, which equals plain
  integer addition of the remaining high bits with the incoming carry;
* a multiplier subtree whose k_eff has decayed to <= 0 is entirely exact and
  equals plain integer multiplication.

Bit-equivalence with the scalar models is pinned by tests.
"""

from __future__ import annotations

import numpy as np

from .arith import CompositeAdderConfig, RecursiveMultConfig, adder_approx_cells
from .library import FullAdderSpec


def _approx_add_arrays(x, y, cin, width: int, k: int, spec: FullAdderSpec):
    """Core mixed chain: k table cells, then one exact high-bits add."""
    s = np.zeros_like(x)
    c = cin
    for i in range(k):
        idx = (((x >> i) & 1) << 2) | (((y >> i) & 1) << 1) | c
        s |= spec.sum_lut[idx] << i
        c = spec.cout_lut[idx]
    if k < width:
        tot = (x >> k) + (y >> k) + c
        s |= (tot & ((1 << (width - k)) - 1)) << k
        c = tot >> (width - k)
    return s, c


def add_batch(cfg: CompositeAdderConfig, x, y, cin=0):
    """Composite adder over arrays of unsigned W-bit operands."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    c = np.broadcast_to(np.asarray(cin, dtype=np.int64), x.shape).copy()
    return _approx_add_arrays(x, y, c, cfg.width, cfg.k_approx, cfg.cell_spec)


def _mult_rec_batch(x, y, width: int, k_eff: int, cfg: RecursiveMultConfig):
    if k_eff <= 0:
        return x * y
    if width == 2:
        return cfg.elem_spec.prod_lut[(x << 2) | y]
    h = width // 2
    mask = (1 << h) - 1
    ll = _mult_rec_batch(x & mask, y & mask, h, k_eff, cfg)
    lh = _mult_rec_batch(x & mask, y >> h, h, k_eff - h, cfg)
    hl = _mult_rec_batch(x >> h, y & mask, h, k_eff - h, cfg)
    hh = _mult_rec_batch(x >> h, y >> h, h, k_eff - 2 * h, cfg)
    pw = 2 * width
    ka = adder_approx_cells(k_eff, pw)
    zero = np.zeros_like(x)
    spec = cfg.internal_adder_spec
    t1, _ = _approx_add_arrays(lh << h, hl << h, zero, pw, ka, spec)
    t2, _ = _approx_add_arrays(ll, t1, zero.copy(), pw, ka, spec)
    p, _ = _approx_add_arrays(t2, hh << (2 * h), zero.copy(), pw, ka, spec)
    return p


def mult_batch(cfg: RecursiveMultConfig, x, y):
    """Unsigned recursive multiplier over arrays."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    return _mult_rec_batch(x, y, cfg.width, cfg.k_approx, cfg)


def signed_mult_batch(cfg: RecursiveMultConfig, x, y):
    """Sign-magnitude multiply over arrays; |-2^(W-1)| saturates first."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    lim = 1 << (cfg.width - 1)
    mx = np.minimum(np.abs(x), lim - 1)
    my = np.minimum(np.abs(y), lim - 1)
    p = _mult_rec_batch(mx, my, cfg.width, cfg.k_approx, cfg)
    return np.where((x < 0) != (y < 0), -p, p)


def add_scalar_fast(x: int, y: int, cin: int, cfg: CompositeAdderConfig) -> int:
    """Scalar composite add via flat LUTs; used in recurrences (running sums)."""
    s = 0
    c = cin
    sum_lut = cfg.cell_spec.sum_lut
    cout_lut = cfg.cell_spec.cout_lut
    k = cfg.k_approx
    for i in range(k):
        idx = (((x >> i) & 1) << 2) | (((y >> i) & 1) << 1) | c
        s |= int(sum_lut[idx]) << i
        c = int(cout_lut[idx])
    if k < cfg.width:
        tot = (x >> k) + (y >> k) + c
        s |= (tot & ((1 << (cfg.width - k)) - 1)) << k
    return s
