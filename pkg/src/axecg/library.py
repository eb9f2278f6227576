"""Elementary arithmetic module library: truth tables plus synthesis cost records.

A library holds 1-bit full-adder cells and 2x2 unsigned multiplier cells, each
fully described by an exhaustive truth table and an (area, delay, power, energy)
cost record.  Larger units are composed from these cells, so the tables are the
single source of truth for both functional simulation and energy accounting.

The built-in defaults ship as package data (``data/module_library.json``) and
can be overridden with any file of the same layout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError

FA_KIND = "fa"
MULT_KIND = "mult2x2"

ACCURATE = "Accurate"


@dataclass
class CostRecord:
    """Per-instance synthesis figures for one elementary cell."""

    area_um2: float
    delay_ns: float
    power_uw: float
    energy_fj: float

    def __post_init__(self):
        for name in ("area_um2", "delay_ns", "power_uw", "energy_fj"):
            if getattr(self, name) < 0:
                raise ConfigError(f"cost field {name} must be >= 0")

    def __add__(self, other: "CostRecord") -> "CostRecord":
        return CostRecord(
            self.area_um2 + other.area_um2,
            self.delay_ns + other.delay_ns,
            self.power_uw + other.power_uw,
            self.energy_fj + other.energy_fj,
        )

    def scaled(self, n: int) -> "CostRecord":
        return CostRecord(self.area_um2 * n, self.delay_ns * n, self.power_uw * n, self.energy_fj * n)

    @classmethod
    def zero(cls) -> "CostRecord":
        return cls(0.0, 0.0, 0.0, 0.0)

    def to_dict(self) -> dict:
        return {
            "area_um2": self.area_um2,
            "delay_ns": self.delay_ns,
            "power_uw": self.power_uw,
            "energy_fj": self.energy_fj,
        }


@dataclass
class FullAdderSpec:
    """Behavioral model of a 1-bit full adder: (a, b, cin) -> (sum, cout)."""

    name: str
    table: dict[tuple[int, int, int], tuple[int, int]]
    sum_lut: np.ndarray = field(init=False, repr=False)
    cout_lut: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        expected = {(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)}
        if set(self.table) != expected:
            raise ConfigError(f"full-adder table for {self.name!r} must cover all 8 input rows")
        for key, (s, co) in self.table.items():
            if s not in (0, 1) or co not in (0, 1):
                raise ConfigError(f"full-adder table for {self.name!r} has non-bit output at {key}")
        # Flat lookup tables indexed by (a<<2)|(b<<1)|cin, shared by the
        # scalar evaluator and the vectorized engine.
        self.sum_lut = np.zeros(8, dtype=np.int64)
        self.cout_lut = np.zeros(8, dtype=np.int64)
        for (a, b, c), (s, co) in self.table.items():
            idx = (a << 2) | (b << 1) | c
            self.sum_lut[idx] = s
            self.cout_lut[idx] = co

    def is_exact(self) -> bool:
        return all(self.table[(a, b, c)] == ((a + b + c) & 1, (a + b + c) >> 1) for (a, b, c) in self.table)


@dataclass
class Mult2x2Spec:
    """Behavioral model of an unsigned 2x2 multiplier: (a, b) -> 4-bit product."""

    name: str
    table: dict[tuple[int, int], int]
    prod_lut: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        expected = {(a, b) for a in range(4) for b in range(4)}
        if set(self.table) != expected:
            raise ConfigError(f"2x2 multiplier table for {self.name!r} must cover all 16 input pairs")
        for key, p in self.table.items():
            if not 0 <= p <= 15:
                raise ConfigError(f"2x2 multiplier table for {self.name!r} has non-4-bit output at {key}")
        self.prod_lut = np.zeros(16, dtype=np.int64)
        for (a, b), p in self.table.items():
            self.prod_lut[(a << 2) | b] = p

    def is_exact(self) -> bool:
        return all(p == a * b for (a, b), p in self.table.items())


@dataclass
class ModuleLibrary:
    """Named collection of elementary specs with their cost records."""

    fa_specs: dict[str, FullAdderSpec]
    mult_specs: dict[str, Mult2x2Spec]
    fa_costs: dict[str, CostRecord]
    mult_costs: dict[str, CostRecord]

    def __post_init__(self):
        if ACCURATE not in self.fa_specs or not self.fa_specs[ACCURATE].is_exact():
            raise ConfigError("library must contain an exact full adder named 'Accurate'")
        if ACCURATE not in self.mult_specs or not self.mult_specs[ACCURATE].is_exact():
            raise ConfigError("library must contain an exact 2x2 multiplier named 'Accurate'")
        for name in self.fa_specs:
            if name not in self.fa_costs:
                raise ConfigError(f"full adder {name!r} has no cost record")
        for name in self.mult_specs:
            if name not in self.mult_costs:
                raise ConfigError(f"2x2 multiplier {name!r} has no cost record")

    def fa(self, name: str) -> FullAdderSpec:
        try:
            return self.fa_specs[name]
        except KeyError:
            raise ConfigError(f"unknown full-adder spec {name!r}") from None

    def mult(self, name: str) -> Mult2x2Spec:
        try:
            return self.mult_specs[name]
        except KeyError:
            raise ConfigError(f"unknown 2x2 multiplier spec {name!r}") from None

    def fa_cost(self, name: str) -> CostRecord:
        try:
            return self.fa_costs[name]
        except KeyError:
            raise ConfigError(f"no cost record for full adder {name!r}") from None

    def mult_cost(self, name: str) -> CostRecord:
        try:
            return self.mult_costs[name]
        except KeyError:
            raise ConfigError(f"no cost record for 2x2 multiplier {name!r}") from None


def _fa_from_json(entry: dict) -> tuple[FullAdderSpec, CostRecord]:
    table = {}
    for key, out in entry["table"].items():
        if len(key) != 3 or any(ch not in "01" for ch in key):
            raise ConfigError(f"bad full-adder table key {key!r} (want three bits, e.g. '101')")
        a, b, c = (int(ch) for ch in key)
        table[(a, b, c)] = (int(out[0]), int(out[1]))
    return FullAdderSpec(entry["name"], table), CostRecord(**entry["cost"])


def _mult_from_json(entry: dict) -> tuple[Mult2x2Spec, CostRecord]:
    table = {}
    for key, out in entry["table"].items():
        parts = key.split(",")
        if len(parts) != 2:
            raise ConfigError(f"bad 2x2 multiplier table key {key!r} (want 'a,b', e.g. '3,2')")
        table[(int(parts[0]), int(parts[1]))] = int(out)
    return Mult2x2Spec(entry["name"], table), CostRecord(**entry["cost"])


def load_library(path: str | Path | None = None) -> ModuleLibrary:
    """Load a module library from ``path``, or the built-in defaults when None."""
    if path is None:
        text = resources.files("axecg.data").joinpath("module_library.json").read_text()
    else:
        text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"module library is not valid JSON: {exc}") from exc

    fa_specs, fa_costs, mult_specs, mult_costs = {}, {}, {}, {}
    for entry in doc.get("full_adders", []):
        spec, cost = _fa_from_json(entry)
        fa_specs[spec.name] = spec
        fa_costs[spec.name] = cost
    for entry in doc.get("multipliers_2x2", []):
        spec, cost = _mult_from_json(entry)
        mult_specs[spec.name] = spec
        mult_costs[spec.name] = cost
    return ModuleLibrary(fa_specs, mult_specs, fa_costs, mult_costs)


def dump_library(lib: ModuleLibrary, path: str | Path) -> None:
    doc = {
        "full_adders": [
            {
                "name": name,
                "table": {f"{a}{b}{c}": list(out) for (a, b, c), out in sorted(spec.table.items())},
                "cost": lib.fa_costs[name].to_dict(),
            }
            for name, spec in lib.fa_specs.items()
        ],
        "multipliers_2x2": [
            {
                "name": name,
                "table": {f"{a},{b}": p for (a, b), p in sorted(spec.table.items())},
                "cost": lib.mult_costs[name].to_dict(),
            }
            for name, spec in lib.mult_specs.items()
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
