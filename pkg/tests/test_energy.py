"""Energy-model checks: table lookups, composition sums, monotonicity."""

import random

import pytest

from axecg.arith import CompositeAdderConfig, RecursiveMultConfig, mult_structure
from axecg.energy import design_cost, stage_cost, unit_cost
from axecg.errors import ConfigError
from axecg.library import ACCURATE, CostRecord, FullAdderSpec, ModuleLibrary
from axecg.stages import STAGE_DEFS, Design, StageConfig


def test_table_seed_values(lib):
    assert lib.fa_cost("Accurate").energy_fj == pytest.approx(0.409)
    assert lib.fa_cost("ApproxAdd5").energy_fj == 0.0
    assert lib.mult_cost("Accurate").energy_fj == pytest.approx(0.288)
    assert lib.mult_cost("AppMultV1").energy_fj == pytest.approx(0.167)
    assert lib.fa_cost("Accurate").area_um2 == pytest.approx(10.08)
    assert lib.mult_cost("AppMultV2").delay_ns == pytest.approx(0.06)


def test_single_cell_costs(lib):
    one = unit_cost(CompositeAdderConfig(1, 0, lib.fa("Accurate")), lib)
    assert one.energy_fj == pytest.approx(0.409)
    wired = unit_cost(CompositeAdderConfig(1, 1, lib.fa("ApproxAdd5")), lib)
    assert wired.energy_fj == 0.0


def test_adder32_costs(lib):
    exact = unit_cost(CompositeAdderConfig(32, 0, lib.fa("ApproxAdd5")), lib)
    assert exact.energy_fj == pytest.approx(32 * 0.409, abs=1e-9)
    assert exact.energy_fj == pytest.approx(13.088)
    full = unit_cost(CompositeAdderConfig(32, 32, lib.fa("ApproxAdd5")), lib)
    assert full.energy_fj == 0.0
    assert full.area_um2 == 0.0
    half = unit_cost(CompositeAdderConfig(32, 16, lib.fa("ApproxAdd5")), lib)
    assert half.energy_fj == pytest.approx(16 * 0.409)


def test_adder_delay_is_chain_sum(lib):
    cfg = CompositeAdderConfig(32, 10, lib.fa("ApproxAdd1"))
    cost = unit_cost(cfg, lib)
    assert cost.delay_ns == pytest.approx(10 * 0.11 + 22 * 0.18)


def test_mult_cost_matches_structure_sum(lib):
    # Independent recomputation from the structure enumeration.
    for k in (0, 7, 16, 31):
        cfg = RecursiveMultConfig(16, k, lib.mult("AppMultV1"), lib.fa("ApproxAdd5"))
        expected = 0.0
        for item in mult_structure(16, k):
            if item[0] == "elem":
                expected += lib.mult_cost("AppMultV1" if item[1] else ACCURATE).energy_fj
            else:
                _, w, ka = item
                expected += ka * lib.fa_cost("ApproxAdd5").energy_fj + (w - ka) * lib.fa_cost(ACCURATE).energy_fj
        assert unit_cost(cfg, lib).energy_fj == pytest.approx(expected)


def test_mult_exact_cost_value(lib):
    cfg = RecursiveMultConfig(16, 0, lib.mult("AppMultV1"), lib.fa("ApproxAdd5"))
    # 672 accurate cells + 64 exact 2x2 modules
    assert unit_cost(cfg, lib).energy_fj == pytest.approx(672 * 0.409 + 64 * 0.288)


def test_mult_delay_deepest_path(lib):
    cfg = RecursiveMultConfig(16, 0, lib.mult("Accurate"), lib.fa("Accurate"))
    # one elementary plus three adder chains per level (widths 8, 16, 32)
    expected = 0.16 + 3 * 0.18 * (8 + 16 + 32)
    assert unit_cost(cfg, lib).delay_ns == pytest.approx(expected)


def test_missing_cost_record_raises(lib):
    fa = dict(lib.fa_specs)
    mult = dict(lib.mult_specs)
    fa_costs = dict(lib.fa_costs)
    mult_costs = dict(lib.mult_costs)
    extra = FullAdderSpec("Custom", dict(lib.fa("Accurate").table))
    fa["Custom"] = extra
    with pytest.raises(ConfigError):
        ModuleLibrary(fa, mult, fa_costs, mult_costs)


def test_stage_cost_counts(lib):
    rep = stage_cost(StageConfig("HPF"), lib)
    adder = 32 * 0.409
    mult = 672 * 0.409 + 64 * 0.288
    assert rep.totals.energy_fj == pytest.approx(31 * adder + 32 * mult)
    assert rep.baseline.energy_fj == rep.totals.energy_fj
    assert rep.reduction == 1.0


def test_stage_reduction_lpf_k16_order_of_magnitude(lib):
    rep = stage_cost(StageConfig("LPF", 16, "ApproxAdd5", "AppMultV1"), lib)
    assert rep.reduction >= 2.0
    assert rep.reduction < 100.0


def test_design_cost_additivity(lib):
    design = Design.accurate().replaced(
        StageConfig("LPF", 8, "ApproxAdd5", "AppMultV1"),
        StageConfig("SQR", 4, "ApproxAdd5", "AppMultV1"),
    )
    total = design_cost(design, lib)
    per_stage = sum(stage_cost(design[sid], lib).totals.energy_fj for sid in STAGE_DEFS)
    assert total.totals.energy_fj == pytest.approx(per_stage)
    base = sum(stage_cost(StageConfig(sid), lib).totals.energy_fj for sid in STAGE_DEFS)
    assert total.baseline.energy_fj == pytest.approx(base)


def test_all_accurate_design_reduction_one(lib):
    rep = design_cost(Design.accurate(), lib)
    assert rep.reduction == pytest.approx(1.0)
    assert rep.totals.energy_fj == pytest.approx(rep.baseline.energy_fj)


def test_baseline_independent_of_config(lib):
    a = design_cost(Design.accurate(), lib)
    b = design_cost(
        Design.accurate().replaced(StageConfig("HPF", 16, "ApproxAdd5", "AppMultV2")), lib
    )
    assert a.baseline.energy_fj == pytest.approx(b.baseline.energy_fj)
    assert a.baseline.area_um2 == pytest.approx(b.baseline.area_um2)


def test_energy_monotone_in_k_random_configs(lib):
    rng = random.Random(2024)
    adders = sorted(lib.fa_specs)
    mults = sorted(lib.mult_specs)
    for _ in range(1000):
        sid = rng.choice(list(STAGE_DEFS))
        max_k = STAGE_DEFS[sid].max_k
        k = rng.randint(0, max_k - 1)
        adder = rng.choice(adders)
        mult = rng.choice(mults)
        lo = design_cost(Design.accurate().replaced(StageConfig(sid, k, adder, mult)), lib)
        hi = design_cost(Design.accurate().replaced(StageConfig(sid, k + 1, adder, mult)), lib)
        assert hi.totals.energy_fj <= lo.totals.energy_fj + 1e-9


def test_reduction_infinite_when_free(lib):
    from axecg.energy import EnergyReport

    rep = EnergyReport(CostRecord.zero(), CostRecord(1, 1, 1, 1))
    assert rep.reduction == float("inf")


def test_cost_record_rejects_negative():
    with pytest.raises(ConfigError):
        CostRecord(-1.0, 0, 0, 0)
