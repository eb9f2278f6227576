"""Acceptance criteria, one test per criterion, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from axecg.arith import CompositeAdderConfig, RecursiveMultConfig, characterize, eval_composite_adder, eval_recursive_mult
from axecg.batchsim import add_batch, mult_batch
from axecg.cli import main
from axecg.dse import (
    DesignEvaluator,
    QualityConstraint,
    SearchSpace,
    exhaustive_search,
    generate_designs,
    pareto_front,
    resilience_sweep,
)
from axecg.ecgio import decode_frames_212, encode_frames_212, synth_ecg
from axecg.energy import design_cost, unit_cost
from axecg.errors import ParseError
from axecg.pipeline import run_pipeline
from axecg.quality import peak_accuracy
from axecg.stages import STAGE_DEFS, Design, StageConfig


@contextmanager
def criterion(num: int, label: str):
    try:
        yield
    except Exception:
        print(f"[FAIL] criterion {num}: {label}")
        raise
    print(f"[PASS] criterion {num}: {label}")


@pytest.fixture(scope="module")
def corpus(lib):
    """Shared synthetic record for the exploration criteria."""
    sig, truth = synth_ecg(20.0, 60.0, 0.0, seed=1)
    return sig, truth


@pytest.fixture(scope="module")
def grid81_result(lib, corpus):
    sig, truth = corpus
    evaluator = DesignEvaluator(sig, lib, truth)
    space = SearchSpace(
        ["LPF", "HPF"],
        {"LPF": list(range(0, 17, 2)), "HPF": list(range(0, 17, 2))},
        ["ApproxAdd5"],
        ["AppMultV1"],
    )
    log = exhaustive_search(space, evaluator)
    return evaluator, space, log


@pytest.fixture(scope="module")
def grid135_log(lib, corpus):
    sig, truth = corpus
    evaluator = DesignEvaluator(sig, lib, truth)
    space = SearchSpace(
        ["DIFF", "SQR", "MWI"],
        {"DIFF": [0, 2, 4], "SQR": [0, 2, 4, 6, 8], "MWI": list(range(0, 17, 2))},
        ["ApproxAdd5"],
        ["AppMultV1"],
    )
    return exhaustive_search(space, evaluator)


def test_c1_exactness_oracle(lib):
    with criterion(1, "exact-mode units match plain integer arithmetic"):
        t0 = time.perf_counter()
        cfg8 = CompositeAdderConfig(8, 0, lib.fa("ApproxAdd5"))
        for x in range(256):
            for y in range(256):
                for cin in (0, 1):
                    s, cout = eval_composite_adder(cfg8, x, y, cin)
                    assert (cout << 8) | s == x + y + cin
        m4 = RecursiveMultConfig(4, 0, lib.mult("AppMultV1"), lib.fa("ApproxAdd5"))
        for x in range(16):
            for y in range(16):
                assert eval_recursive_mult(m4, x, y) == x * y
        rng = np.random.default_rng(12345)
        n = 100_000
        a32 = CompositeAdderConfig(32, 0, lib.fa("ApproxAdd5"))
        x = rng.integers(0, 2**32, size=n, dtype=np.uint64).astype(np.int64)
        y = rng.integers(0, 2**32, size=n, dtype=np.uint64).astype(np.int64)
        s, c = add_batch(a32, x, y)
        total = x + y  # int64 add of 32-bit values cannot overflow
        assert np.array_equal(s, total & 0xFFFFFFFF)
        assert np.array_equal(c, total >> 32)
        m16 = RecursiveMultConfig(16, 0, lib.mult("AppMultV1"), lib.fa("ApproxAdd5"))
        xm = rng.integers(0, 2**16, size=n).astype(np.int64)
        ym = rng.integers(0, 2**16, size=n).astype(np.int64)
        assert np.array_equal(mult_batch(m16, xm, ym), xm * ym)
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0, f"exactness suite took {elapsed:.1f}s"


def test_c2_elementary_characterization(lib):
    with criterion(2, "elementary error characterization"):
        v1 = characterize(lib.mult("AppMultV1"))
        assert v1.error_rate == pytest.approx(1 / 16)
        assert v1.max_abs_error == 2
        fa = characterize(lib.fa("Accurate"))
        assert fa.error_rate == 0.0
        assert fa.max_abs_error == 0


def test_c3_energy_model(lib):
    with criterion(3, "energy model lookups, sums and monotonicity"):
        assert unit_cost(CompositeAdderConfig(1, 0, lib.fa("Accurate")), lib).energy_fj == pytest.approx(0.409)
        assert unit_cost(CompositeAdderConfig(1, 1, lib.fa("ApproxAdd5")), lib).energy_fj == 0.0
        assert unit_cost(CompositeAdderConfig(32, 32, lib.fa("ApproxAdd5")), lib).energy_fj == 0.0
        assert unit_cost(CompositeAdderConfig(32, 0, lib.fa("ApproxAdd5")), lib).energy_fj == pytest.approx(13.088)
        import random

        rnd = random.Random(99)
        adders = sorted(lib.fa_specs)
        mults = sorted(lib.mult_specs)
        for _ in range(1000):
            sid = rnd.choice(list(STAGE_DEFS))
            k = rnd.randint(0, STAGE_DEFS[sid].max_k - 1)
            adder, mult = rnd.choice(adders), rnd.choice(mults)
            lo = design_cost(Design.accurate().replaced(StageConfig(sid, k, adder, mult)), lib)
            hi = design_cost(Design.accurate().replaced(StageConfig(sid, k + 1, adder, mult)), lib)
            assert hi.totals.energy_fj <= lo.totals.energy_fj + 1e-9


def test_c4_pipeline_correctness(lib):
    with criterion(4, "all-accurate pipeline detects every synthetic beat"):
        t0 = time.perf_counter()
        for bpm in (60.0, 80.0, 120.0):
            sig, truth = synth_ecg(30.0, bpm, 0.0, seed=17)
            out = run_pipeline(sig, Design.accurate(), lib)
            m = peak_accuracy(truth.indices, out.detected_peaks)
            assert m.accuracy == 100.0, f"clean {bpm} bpm: {m}"
        elapsed = time.perf_counter() - t0
        assert elapsed < 30.0, f"clean runs took {elapsed:.1f}s"
        for bpm in (60.0, 80.0, 120.0):
            sig, truth = synth_ecg(30.0, bpm, 0.05, seed=18)
            out = run_pipeline(sig, Design.accurate(), lib)
            m = peak_accuracy(truth.indices, out.detected_peaks)
            assert m.accuracy >= 99.0, f"5% noise {bpm} bpm: {m}"


def test_c5_lpf_resilience_threshold(lib):
    with criterion(5, "LPF resilience: plateau then collapse, PSNR ordering"):
        sig, truth = synth_ecg(30.0, 60.0, 0.0, seed=1)
        ks = list(range(0, 17, 2))
        rows = resilience_sweep("LPF", ks, "ApproxAdd5", "AppMultV1", sig, lib, truth)
        acc = {r.k: r.peak_acc for r in rows}
        psnr = {r.k: r.psnr for r in rows}
        plateau = [k for k in ks if all(acc[j] == 100.0 for j in ks if j <= k)]
        k_star = max(plateau) if plateau else -1
        assert k_star >= 4, f"accuracy plateau ends at k={k_star}"
        assert any(acc[k] < 50.0 for k in ks), "no collapse within the stage maximum"
        assert psnr[16] < psnr[4]


def test_c6_dse_counts(lib, corpus, grid81_result, grid135_log):
    with criterion(6, "exploration evaluation counts and committed quality"):
        _, space81, log81 = grid81_result
        assert log81.count == 81
        assert grid135_log.count == 135
        sig, truth = corpus
        evaluator = DesignEvaluator(sig, lib, truth)
        result = generate_designs(space81, evaluator, QualityConstraint("PSNR", 15.0))
        assert result.log.count <= 20, f"generate used {result.log.count} evaluations"
        # the exact grid point always satisfies, so a committed design must too
        assert any(p.quality("PSNR") >= 15.0 for p in log81.points)
        assert result.chosen.quality("PSNR") >= 15.0
        committed = Design.accurate().replaced(*result.stage_architectures.values())
        check = evaluator.evaluate(committed)
        assert check.quality("PSNR") >= 15.0


def test_c7_energy_quality_endpoint(lib, grid135_log):
    with criterion(7, "exploration reaches >= 10x energy reduction at 100% accuracy"):
        sig, truth = synth_ecg(30.0, 60.0, 0.0, seed=1)
        evaluator = DesignEvaluator(sig, lib, truth)
        pre_space = SearchSpace(
            ["LPF", "HPF"],
            {"LPF": list(range(0, 17)), "HPF": list(range(0, 17))},
            ["ApproxAdd5"],
            ["AppMultV2", "AppMultV1"],
        )
        pre = generate_designs(pre_space, evaluator, QualityConstraint("PSNR", 22.0))
        base = Design.accurate().replaced(pre.chosen.design["LPF"], pre.chosen.design["HPF"])
        proc_space = SearchSpace(
            ["DIFF", "SQR", "MWI"],
            {"DIFF": list(range(0, 5)), "SQR": list(range(0, 9)), "MWI": list(range(0, 17))},
            ["ApproxAdd5"],
            ["AppMultV2", "AppMultV1"],
        )
        proc = generate_designs(proc_space, evaluator, QualityConstraint("PEAK_ACC", 100.0),
                                base_design=base)
        best = proc.chosen
        assert best.peak_acc == 100.0
        assert best.energy.reduction >= 10.0, f"best reduction {best.energy.reduction:.2f}x"
        # Pareto front of the exhaustive detection grid has at least two points
        front = pareto_front(grid135_log.points, "PEAK_ACC")
        assert len(front) >= 2


def test_c8_parser_round_trip():
    with criterion(8, "packed-212 round trip and malformed-frame error"):
        rng = np.random.default_rng(4242)
        samples = rng.integers(-2048, 2048, size=200_000).astype(np.int64)
        assert np.array_equal(decode_frames_212(encode_frames_212(samples)), samples)
        with pytest.raises(ParseError):
            decode_frames_212(b"\x00" * 4)


def test_c9_determinism(tmp_path):
    with criterion(9, "identical config and seed give byte-identical outputs"):
        import json

        cfg_doc = {
            "input": {"kind": "synthetic", "duration_s": 8, "heart_rate_bpm": 60,
                      "noise_amplitude": 0.03},
            "search": {"mode": "exhaustive", "stages": ["LPF", "HPF"],
                       "k_levels": {"LPF": [0, 8], "HPF": [0, 8]},
                       "adders": ["ApproxAdd5"], "mults": ["AppMultV1"]},
            "seed": 3,
            "out_dir": str(tmp_path / "ignored"),
        }
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(cfg_doc))
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["explore", "--config", str(cfg), "--out", str(out), "--seed", "3"]) == 0
            assert main(["sweep", "--config", str(cfg), "--out", str(out / "sw"), "--seed", "3"]) == 0
            tree = {}
            for p in sorted(out.rglob("*")):
                if p.is_file():
                    tree[str(p.relative_to(out))] = p.read_bytes()
            outs.append(tree)
        assert outs[0].keys() == outs[1].keys()
        for name in outs[0]:
            assert outs[0][name] == outs[1][name], f"{name} differs between reruns"
