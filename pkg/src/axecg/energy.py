"""Analytical area/delay/power/energy accounting for units, stages, designs.

Area, power, and energy of a composite unit are the sums over its elementary
instances, each looked up in the module library by the spec actually assigned
under the k mapping.  Delay is a worst-case path sum: the full carry chain
for an adder, the deepest block path for a multiplier.  Registers, wiring and
control are outside the model, so delay figures are model estimates rather
than synthesized latencies.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import CompositeAdderConfig, RecursiveMultConfig, adder_approx_cells, mult_structure
from .library import ACCURATE, CostRecord, ModuleLibrary
from .stages import Design, StageConfig


@dataclass
class EnergyReport:
    """Totals of a configured unit set next to its all-accurate baseline."""

    totals: CostRecord
    baseline: CostRecord

    @property
    def reduction(self) -> float:
        if self.totals.energy_fj == 0.0:
            return float("inf")
        return self.baseline.energy_fj / self.totals.energy_fj

    def to_dict(self) -> dict:
        return {
            "totals": self.totals.to_dict(),
            "baseline": self.baseline.to_dict(),
            "reduction": self.reduction,
        }


def _adder_cost(width: int, approx_cells: int, spec_name: str, lib: ModuleLibrary) -> CostRecord:
    approx = lib.fa_cost(spec_name).scaled(approx_cells)
    exact = lib.fa_cost(ACCURATE).scaled(width - approx_cells)
    return approx + exact


def _mult_delay(width: int, k_eff: int, mult_name: str, adder_name: str, lib: ModuleLibrary) -> float:
    if width == 2:
        name = mult_name if k_eff > 0 else ACCURATE
        return lib.mult_cost(name).delay_ns
    h = width // 2
    deepest = max(_mult_delay(h, ck, mult_name, adder_name, lib) for ck in (k_eff, k_eff - h, k_eff - 2 * h))
    pw = 2 * width
    ka = adder_approx_cells(k_eff, pw)
    chain = ka * lib.fa_cost(adder_name).delay_ns + (pw - ka) * lib.fa_cost(ACCURATE).delay_ns
    return deepest + 3 * chain


def unit_cost(cfg: CompositeAdderConfig | RecursiveMultConfig, lib: ModuleLibrary) -> CostRecord:
    """Cost of one composite unit under its configured k mapping."""
    if isinstance(cfg, CompositeAdderConfig):
        return _adder_cost(cfg.width, cfg.k_approx, cfg.cell_spec.name, lib)
    if isinstance(cfg, RecursiveMultConfig):
        total = CostRecord.zero()
        for item in mult_structure(cfg.width, cfg.k_approx):
            if item[0] == "elem":
                name = cfg.elem_spec.name if item[1] else ACCURATE
                total = total + lib.mult_cost(name)
            else:
                _, adder_width, approx_cells = item
                total = total + _adder_cost(adder_width, approx_cells, cfg.internal_adder_spec.name, lib)
        delay = _mult_delay(cfg.width, cfg.k_approx, cfg.elem_spec.name, cfg.internal_adder_spec.name, lib)
        return CostRecord(total.area_um2, delay, total.power_uw, total.energy_fj)
    raise TypeError(f"cannot cost {type(cfg).__name__}")


def _stage_totals(stage: StageConfig, lib: ModuleLibrary) -> CostRecord:
    sdef = stage.stage_def
    total = CostRecord.zero()
    if sdef.adders:
        total = total + unit_cost(stage.adder_config(lib), lib).scaled(sdef.adders)
    if sdef.mults:
        total = total + unit_cost(stage.mult_config(lib), lib).scaled(sdef.mults)
    return total


def stage_cost(stage: StageConfig, lib: ModuleLibrary) -> EnergyReport:
    """Cost of one stage's declared adder/multiplier instances; registers are free."""
    baseline = _stage_totals(StageConfig(stage.stage_id), lib)
    return EnergyReport(_stage_totals(stage, lib), baseline)


def design_cost(design: Design, lib: ModuleLibrary) -> EnergyReport:
    """Component-wise sum of the five stage reports."""
    totals = CostRecord.zero()
    baseline = CostRecord.zero()
    for stage in design.stages.values():
        rep = stage_cost(stage, lib)
        totals = totals + rep.totals
        baseline = baseline + rep.baseline
    return EnergyReport(totals, baseline)
