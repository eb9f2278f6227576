"""Bit-accurate behavioral models of composite approximate arithmetic units.

Two unit families are composed from the elementary library cells:

* Ripple-carry adder of width W: cell i consumes the carry of cell i-1;
  cells 0..k-1 use the configured approximate cell, cells k..W-1 the exact
  cell.

* Recursive multiplier of width W (power of two): operands split in half,
  the four partial products of the W/2 sub-multipliers are accumulated with
  three 2W-bit ripple adders (t1 = lh<<h + hl<<h, t2 = ll + t1,
  p = t2 + hh<<2h).  The approximation degree k counts product LSBs: a 2x2
  leaf at operand bit-offsets (i, j) is approximate iff i + j < k, and an
  accumulation-adder cell whose weight in the enclosing sub-product is w is
  approximate iff w < k at that sub-product's offset.  Both rules follow from
  handing each sub-unit k_eff = k - (block offset) and letting every adder
  approximate its min(max(k_eff, 0), 2*width) least significant cells, which
  keeps all approximation error below product bit k.

All evaluators are pure functions of (config, operands).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .library import FullAdderSpec, Mult2x2Spec


def _exact_fa() -> FullAdderSpec:
    table = {(a, b, c): ((a + b + c) & 1, (a + b + c) >> 1) for a in (0, 1) for b in (0, 1) for c in (0, 1)}
    return FullAdderSpec("Accurate", table)


def _exact_mult() -> Mult2x2Spec:
    return Mult2x2Spec("Accurate", {(a, b): a * b for a in range(4) for b in range(4)})


EXACT_FA = _exact_fa()
EXACT_MULT = _exact_mult()


@dataclass
class CompositeAdderConfig:
    """W-bit ripple-carry adder with its k_approx low cells replaced."""

    width: int
    k_approx: int
    cell_spec: FullAdderSpec

    def __post_init__(self):
        if self.width < 1:
            raise ConfigError("adder width must be >= 1")
        if not 0 <= self.k_approx <= self.width:
            raise ConfigError(f"adder k_approx must be in [0, {self.width}], got {self.k_approx}")


@dataclass
class RecursiveMultConfig:
    """WxW recursive multiplier with its k_approx low product bits approximated."""

    width: int
    k_approx: int
    elem_spec: Mult2x2Spec
    internal_adder_spec: FullAdderSpec

    def __post_init__(self):
        if self.width < 2 or self.width & (self.width - 1):
            raise ConfigError(f"multiplier width must be a power of two >= 2, got {self.width}")
        if not 0 <= self.k_approx <= 2 * self.width:
            raise ConfigError(f"multiplier k_approx must be in [0, {2 * self.width}], got {self.k_approx}")


def eval_full_adder(spec: FullAdderSpec, a: int, b: int, cin: int) -> tuple[int, int]:
    """Look up one cell: (a, b, cin) -> (sum, cout)."""
    return spec.table[(a, b, cin)]


def eval_mult2x2(spec: Mult2x2Spec, a: int, b: int) -> int:
    """Look up one elementary product: (a, b) -> 4-bit p."""
    return spec.table[(a, b)]


def eval_composite_adder(cfg: CompositeAdderConfig, x: int, y: int, cin: int = 0) -> tuple[int, int]:
    """Ripple the carry through all W cells, LSB first."""
    lim = 1 << cfg.width
    if not (0 <= x < lim and 0 <= y < lim):
        raise ValueError(f"operands must fit in {cfg.width} unsigned bits")
    if cin not in (0, 1):
        raise ValueError("cin must be 0 or 1")
    s = 0
    c = cin
    for i in range(cfg.width):
        spec = cfg.cell_spec if i < cfg.k_approx else EXACT_FA
        bit, c = spec.table[((x >> i) & 1, (y >> i) & 1, c)]
        s |= bit << i
    return s, c


def adder_approx_cells(k_eff: int, adder_width: int) -> int:
    """Number of approximated low cells of an accumulation adder at k_eff."""
    return min(max(k_eff, 0), adder_width)


def _mult_rec(x: int, y: int, width: int, k_eff: int, cfg: RecursiveMultConfig) -> int:
    if width == 2:
        spec = cfg.elem_spec if k_eff > 0 else EXACT_MULT
        return spec.table[(x, y)]
    h = width // 2
    mask = (1 << h) - 1
    ll = _mult_rec(x & mask, y & mask, h, k_eff, cfg)
    lh = _mult_rec(x & mask, y >> h, h, k_eff - h, cfg)
    hl = _mult_rec(x >> h, y & mask, h, k_eff - h, cfg)
    hh = _mult_rec(x >> h, y >> h, h, k_eff - 2 * h, cfg)
    pw = 2 * width
    acfg = CompositeAdderConfig(pw, adder_approx_cells(k_eff, pw), cfg.internal_adder_spec)
    t1, _ = eval_composite_adder(acfg, lh << h, hl << h)
    t2, _ = eval_composite_adder(acfg, ll, t1)
    p, _ = eval_composite_adder(acfg, t2, hh << (2 * h))
    return p


def eval_recursive_mult(cfg: RecursiveMultConfig, x: int, y: int) -> int:
    """Unsigned WxW multiply through the recursive block structure."""
    lim = 1 << cfg.width
    if not (0 <= x < lim and 0 <= y < lim):
        raise ValueError(f"operands must fit in {cfg.width} unsigned bits")
    return _mult_rec(x, y, cfg.width, cfg.k_approx, cfg)


def eval_signed_mult(cfg: RecursiveMultConfig, x: int, y: int) -> int:
    """Sign-magnitude wrapper around the unsigned core.

    |-2^(W-1)| does not fit the magnitude datapath and saturates to
    2^(W-1) - 1 before multiplying.
    """
    lim = 1 << (cfg.width - 1)
    if not (-lim <= x < lim and -lim <= y < lim):
        raise ValueError(f"operands must fit in signed {cfg.width}-bit range")
    mx = min(abs(x), lim - 1)
    my = min(abs(y), lim - 1)
    p = eval_recursive_mult(cfg, mx, my)
    return -p if (x < 0) != (y < 0) else p


def mult_structure(width: int, k_approx: int):
    """Enumerate the instances inside a recursive multiplier.

    Yields ("elem", is_approx) for each 2x2 leaf and
    ("adder", adder_width, approx_cells) for each accumulation adder, in a
    fixed depth-first order.  Shared by the energy model so that functional
    simulation and cost accounting can never disagree on the k mapping.
    """

    def walk(w: int, k_eff: int):
        if w == 2:
            yield ("elem", k_eff > 0)
            return
        h = w // 2
        for child_k in (k_eff, k_eff - h, k_eff - h, k_eff - 2 * h):
            yield from walk(h, child_k)
        pw = 2 * w
        ka = adder_approx_cells(k_eff, pw)
        for _ in range(3):
            yield ("adder", pw, ka)

    yield from walk(width, k_approx)


@dataclass
class ErrorStats:
    """Exhaustive error figures of one elementary spec vs. its exact twin."""

    error_rate: float
    max_abs_error: int


def characterize(spec: FullAdderSpec | Mult2x2Spec) -> ErrorStats:
    """Enumerate the whole table and compare against exact arithmetic."""
    wrong = 0
    max_err = 0
    if isinstance(spec, FullAdderSpec):
        for (a, b, c), (s, co) in spec.table.items():
            exact = a + b + c
            if (s, co) != (exact & 1, exact >> 1):
                wrong += 1
            max_err = max(max_err, abs((s + 2 * co) - exact))
        return ErrorStats(wrong / 8.0, max_err)
    if isinstance(spec, Mult2x2Spec):
        for (a, b), p in spec.table.items():
            if p != a * b:
                wrong += 1
            max_err = max(max_err, abs(p - a * b))
        return ErrorStats(wrong / 16.0, max_err)
    raise TypeError(f"cannot characterize {type(spec).__name__}")
