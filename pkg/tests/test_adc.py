import numpy as np
import pytest

from oracles import chi_square_pvalue, quad_bin_probabilities, \
    quad_interval_mass
from vacuumrng import (AdcConfig, BinDistribution, ValidationError,
                       bin_probabilities, offscale_fraction, quantize)


@pytest.fixture
def cfg3():
    return AdcConfig(bits=3, range_mv=1.0)


class TestAdcConfig:
    def test_geometry(self, cfg3):
        assert cfg3.delta == 0.25
        assert cfg3.i_low == -4
        assert cfg3.i_high == 3
        assert cfg3.lower_sat_edge() == pytest.approx(-0.875)
        assert cfg3.upper_sat_edge() == pytest.approx(0.625)

    def test_bounds(self):
        with pytest.raises(ValidationError):
            AdcConfig(1, 1.0)
        with pytest.raises(ValidationError):
            AdcConfig(25, 1.0)
        with pytest.raises(ValidationError):
            AdcConfig(8, 0.0)


class TestQuantize:
    def test_center_of_zero_bin(self, cfg3):
        assert quantize(0.0, cfg3) == 0

    def test_positive_saturation(self, cfg3):
        # top of scale is R - 3*delta/2 = 0.625, so 0.7 clamps to i_M
        assert quantize(0.7, cfg3) == 3

    def test_negative_saturation(self, cfg3):
        # below -R + delta/2 = -0.875 clamps to i_L
        assert quantize(-0.95, cfg3) == -4

    def test_edges_enumerated(self, cfg3):
        # walk every interior edge: [V_i - d/2, V_i + d/2) owns bin i
        for i in range(cfg3.i_low + 1, cfg3.i_high):
            center = i * cfg3.delta
            assert quantize(center - cfg3.delta / 2, cfg3) == i
            assert quantize(center + cfg3.delta / 2 - 1e-12, cfg3) == i

    def test_monotone(self):
        cfg = AdcConfig(6, 3.7)
        v = np.sort(np.random.default_rng(5).uniform(-10, 10, 2000))
        idx = quantize(v, cfg)
        assert np.all(np.diff(idx) >= 0)

    def test_reconstruction_error(self):
        cfg = AdcConfig(6, 3.7)
        rng = np.random.default_rng(6)
        v = rng.uniform(cfg.lower_sat_edge(), cfg.upper_sat_edge(), 5000)
        idx = quantize(v, cfg)
        assert np.all(np.abs(idx * cfg.delta - v) <= cfg.delta / 2 + 1e-12)

    def test_nonfinite_rejected(self, cfg3):
        with pytest.raises(ValidationError):
            quantize(float("nan"), cfg3)


class TestBinProbabilities:
    def test_total_mass_randomized(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            cfg = AdcConfig(int(rng.integers(2, 13)),
                            float(rng.uniform(0.1, 50)))
            dist = bin_probabilities(float(rng.uniform(-5, 5)),
                                     float(rng.uniform(0.05, 20)), cfg,
                                     float(rng.uniform(-5, 5)))
            assert abs(dist.probs.sum() - 1.0) <= 1e-12

    def test_symmetry_about_center(self, cfg3):
        dist = bin_probabilities(0.0, 0.8, cfg3)
        for i in range(1, cfg3.i_high):
            assert dist.prob(i) == pytest.approx(dist.prob(-i), abs=1e-12)

    def test_center_bin_vs_quadrature(self, cfg3):
        dist = bin_probabilities(0.0, 1.0, cfg3)
        expected = quad_interval_mass(0.0, 1.0, -0.125, 0.125)
        assert dist.prob(0) == pytest.approx(expected, abs=1e-10)
        assert dist.prob(0) == pytest.approx(0.0995, abs=5e-4)

    def test_all_bins_vs_quadrature(self):
        cfg = AdcConfig(4, 2.3)
        for mean, std, shift in [(0.0, 1.0, 0.0), (0.4, 0.7, -0.2),
                                 (-1.1, 2.5, 0.9)]:
            dist = bin_probabilities(mean, std, cfg, shift)
            expected = quad_bin_probabilities(mean, std, cfg, shift)
            np.testing.assert_allclose(dist.probs, expected, atol=1e-10)

    def test_shift_equivalence(self):
        cfg = AdcConfig(5, 4.0)
        rng = np.random.default_rng(8)
        for _ in range(20):
            mean = float(rng.uniform(-2, 2))
            std = float(rng.uniform(0.1, 3))
            off = float(rng.uniform(-2, 2))
            s = float(rng.uniform(-3, 3))
            a = bin_probabilities(mean + s, std, cfg, off + s)
            b = bin_probabilities(mean, std, cfg, off)
            np.testing.assert_allclose(a.probs, b.probs, atol=1e-12)

    def test_extreme_tails_no_underflow_blowup(self):
        # far-out edge bins must come back as clean zeros, not NaN
        cfg = AdcConfig(12, 500.0)
        dist = bin_probabilities(0.0, 1.0, cfg)
        assert np.all(np.isfinite(dist.probs))
        assert dist.probs[0] == 0.0 and dist.probs[-1] == 0.0

    def test_nonpositive_stddev(self, cfg3):
        with pytest.raises(ValidationError):
            bin_probabilities(0.0, 0.0, cfg3)


class TestOffscaleFraction:
    def test_fully_interior(self):
        cfg = AdcConfig(8, 100.0)
        dist = bin_probabilities(0.0, 1.0, cfg)
        assert offscale_fraction(dist) < 1e-12

    def test_tiny_range_saturates(self):
        cfg = AdcConfig(8, 1e-6)
        dist = bin_probabilities(0.0, 1.0, cfg)
        assert offscale_fraction(dist) > 1.0 - 1e-6

    def test_against_quadrature(self, cfg3):
        dist = bin_probabilities(0.0, 1.0, cfg3)
        tails = (quad_interval_mass(0.0, 1.0, -50.0, -0.875)
                 + quad_interval_mass(0.0, 1.0, 0.625, 50.0))
        assert offscale_fraction(dist) == pytest.approx(tails, abs=1e-10)


class TestBinDistribution:
    def test_validation(self, cfg3):
        with pytest.raises(ValidationError):
            BinDistribution(np.ones(8) / 7.0, cfg3)
        with pytest.raises(ValidationError):
            BinDistribution(np.ones(4) / 4.0, cfg3)

    def test_immutability(self, cfg3):
        dist = bin_probabilities(0.0, 1.0, cfg3)
        with pytest.raises(ValueError):
            dist.probs[0] = 0.5


def test_empirical_histogram_matches_analytic():
    from vacuumrng import NoiseModel, SimSpec, generate

    cfg = AdcConfig(8, 4.0)
    model = NoiseModel(0.64, 0.36)
    spec = SimSpec(model=model, cfg=cfg, count=1_000_000, seed=99)
    samples = generate(spec)
    counts = np.bincount(samples.astype(int) - cfg.i_low,
                         minlength=cfg.n_bins)
    expected = bin_probabilities(0.0, 1.0, cfg).probs
    assert chi_square_pvalue(counts, expected) > 0.001
