import numpy as np
import pytest

from vacuumrng import (InsufficientDataError, ValidationError,
                       block_frequency, cusum, ks_uniformity, monobit,
                       proportion_interval, run_battery, runs)
from vacuumrng.health import TestReport


def good_bits(n, seed):
    return np.random.Generator(np.random.Philox(seed)).integers(
        0, 2, n, dtype=np.uint8)


class TestMonobit:
    def test_all_zeros_fails(self):
        assert monobit(np.zeros(1000, np.uint8)) < 1e-100

    def test_perfect_balance(self):
        bits = np.concatenate([np.zeros(500, np.uint8),
                               np.ones(500, np.uint8)])
        assert monobit(bits) == 1.0

    def test_random_passes(self):
        assert monobit(good_bits(100_000, 1)) > 0.01

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            monobit(np.ones(99, np.uint8))

    def test_non_binary_rejected(self):
        with pytest.raises(ValidationError):
            monobit(np.full(200, 2, np.uint8))


class TestBlockFrequency:
    def test_random_passes(self):
        assert block_frequency(good_bits(100_000, 2)) > 0.01

    def test_alternating_blocks_fail(self):
        # blocks of solid zeros and solid ones balance globally but
        # every block is maximally biased
        bits = np.tile(np.concatenate([np.zeros(128, np.uint8),
                                       np.ones(128, np.uint8)]), 100)
        assert block_frequency(bits, 128) < 1e-100

    def test_needs_enough_blocks(self):
        with pytest.raises(InsufficientDataError):
            block_frequency(np.ones(1000, np.uint8), 128)


class TestRuns:
    def test_alternating_fails(self):
        bits = np.arange(10_000, dtype=np.uint8) & 1
        assert runs(bits) < 1e-100

    def test_biased_precheck_shortcut(self):
        bits = np.zeros(10_000, np.uint8)
        bits[:100] = 1
        assert runs(bits) == 0.0

    def test_random_passes(self):
        assert runs(good_bits(100_000, 3)) > 0.01


class TestCusum:
    def test_random_passes(self):
        for forward in (True, False):
            assert cusum(good_bits(100_000, 4), forward) > 0.01

    def test_drifting_walk_fails(self):
        bits = np.concatenate([np.ones(600, np.uint8),
                               good_bits(400, 5)])
        assert cusum(bits) < 1e-6

    def test_reversal_of_symmetric_stream(self):
        bits = good_bits(50_000, 6)
        assert cusum(bits[::-1], forward=True) == pytest.approx(
            cusum(bits, forward=False), abs=1e-12)


class TestInvariances:
    def test_complement_symmetry(self):
        # every battery statistic only sees |ones - zeros| or run
        # structure, both invariant under global complement
        bits = good_bits(50_000, 7)
        comp = 1 - bits
        assert monobit(comp) == pytest.approx(monobit(bits), abs=1e-12)
        assert block_frequency(comp) == pytest.approx(block_frequency(bits),
                                                      abs=1e-12)
        assert runs(comp) == pytest.approx(runs(bits), abs=1e-12)
        assert cusum(comp) == pytest.approx(cusum(bits), abs=1e-12)


class TestProportionInterval:
    def test_reference_values(self):
        lo, hi = proportion_interval(0.01, 1000)
        assert lo == pytest.approx(0.9805607, abs=1e-6)
        assert hi == pytest.approx(0.9994393, abs=1e-6)

    def test_shrinks_with_n(self):
        w1 = np.diff(proportion_interval(0.01, 100))[0]
        w2 = np.diff(proportion_interval(0.01, 10_000))[0]
        assert w2 == pytest.approx(w1 / 10, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValidationError):
            proportion_interval(0.0, 100)
        with pytest.raises(ValidationError):
            proportion_interval(0.01, 0)


class TestKsUniformity:
    def test_uniform_grid(self):
        # midpoints of 1000 equal cells: KS statistic is exactly 0.0005
        p = (np.arange(1000) + 0.5) / 1000
        assert ks_uniformity(p) > 0.999

    def test_clustered_fails(self):
        assert ks_uniformity(np.full(100, 0.5)) < 1e-10

    def test_range_check(self):
        with pytest.raises(ValidationError):
            ks_uniformity(np.linspace(0, 1.5, 20))
        with pytest.raises(InsufficientDataError):
            ks_uniformity(np.linspace(0.1, 0.9, 5))


class TestBattery:
    def test_good_streams_pass(self):
        sequences = [good_bits(100_000, 100 + i) for i in range(20)]
        report = run_battery(sequences, alpha=0.01)
        assert report.n_sequences == 20
        for flags in report.pass_flags.values():
            assert sum(flags) >= 18          # at most 2 failures per test
        assert set(report.p_values) == {"monobit", "block_frequency",
                                        "runs", "cusum"}
        assert set(report.ks_p_values) == set(report.p_values)

    def test_bad_stream_flagged(self):
        report = run_battery([np.zeros(100_000, np.uint8)], alpha=0.01)
        assert not any(any(v) for v in report.pass_flags.values())
        assert not report.all_pass()

    def test_report_serialization(self):
        report = run_battery([good_bits(100_000, 200)], alpha=0.01)
        text = report.as_text()
        assert "alpha=0.01" in text and "monobit.pass_fraction" in text
        csv = report.as_csv()
        assert csv.splitlines()[0] == "sequence,test,p_value,passed"
        assert len(csv.splitlines()) == 1 + 4

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            run_battery([])

    def test_all_pass_uses_proportion(self):
        report = TestReport(alpha=0.01, n_sequences=10,
                            p_values={"monobit": [0.5] * 10},
                            pass_flags={"monobit": [True] * 9 + [False]},
                            proportion=(0.95, 1.0))
        assert not report.all_pass()
        report.proportion = (0.85, 1.0)
        assert report.all_pass()
