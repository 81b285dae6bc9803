import math

import numpy as np
import pytest

from vacuumrng import (CalibrationError, DetectorModel, NoiseModel,
                       ValidationError, clearance_db,
                       electronic_noise_voltage, qcnr_db,
                       qcnr_from_clearance, shot_noise_power_dbm)
from vacuumrng.constants import photon_energy


class TestClearance:
    def test_identical_variances(self):
        assert clearance_db(5.89, 5.89) == 0.0

    def test_measured_variances(self):
        # 10*log10(154.43/5.89), frozen from arbitrary-precision eval
        assert clearance_db(154.43, 5.89) == pytest.approx(
            14.186163766586414, abs=1e-12)

    def test_factor_two(self):
        for x in (0.3, 5.89, 123.0):
            assert clearance_db(2 * x, x) == pytest.approx(
                3.0102999566398120, abs=1e-12)

    def test_domain_error_on_inversion(self):
        with pytest.raises(CalibrationError):
            clearance_db(5.0, 6.0)

    def test_nonpositive_rejected(self):
        with pytest.raises(ValidationError):
            clearance_db(0.0, 1.0)
        with pytest.raises(ValidationError):
            clearance_db(1.0, -1.0)

    def test_monotonicity(self):
        rng = np.random.Generator(np.random.Philox(1))
        for _ in range(50):
            cl = float(rng.uniform(0.1, 10))
            obs = cl + float(rng.uniform(0.1, 100))
            assert clearance_db(obs * 1.01, cl) > clearance_db(obs, cl)
            assert clearance_db(obs, cl * 1.01) < clearance_db(obs, cl)


class TestQcnr:
    def test_identical(self):
        assert qcnr_db(5.89, 5.89) == 0.0

    def test_measured_split(self):
        # sigma_quan^2 = 154.43 - 5.89 = 148.54
        assert qcnr_db(148.54, 5.89) == pytest.approx(
            14.017281247924771, abs=1e-12)

    def test_factor_ten(self):
        assert qcnr_db(12.3, 1.23) == pytest.approx(10.0, abs=1e-12)

    def test_from_clearance_unity(self):
        assert qcnr_from_clearance(3.0102999566398120) == pytest.approx(
            0.0, abs=1e-12)

    def test_from_clearance_low_lo(self):
        assert qcnr_from_clearance(4.06) == pytest.approx(
            1.8944265732543006, abs=1e-12)

    def test_consistency_with_variances(self):
        assert qcnr_from_clearance(clearance_db(154.43, 5.89)) == \
            pytest.approx(qcnr_db(148.54, 5.89), abs=1e-9)

    def test_round_trip_randomized(self):
        rng = np.random.Generator(np.random.Philox(2))
        for _ in range(200):
            sq = float(rng.uniform(0.01, 500))
            sc = float(rng.uniform(0.01, 500))
            via_clearance = qcnr_from_clearance(clearance_db(sq + sc, sc))
            assert via_clearance == pytest.approx(qcnr_db(sq, sc), abs=1e-9)

    def test_nonpositive_clearance_rejected(self):
        with pytest.raises(CalibrationError):
            qcnr_from_clearance(0.0)
        with pytest.raises(CalibrationError):
            qcnr_from_clearance(-3.0)


class TestShotNoisePower:
    def setup_method(self):
        self.det = DetectorModel(quantum_efficiency=0.9,
                                 resolution_bandwidth=1e5,
                                 transimpedance=1.6e4,
                                 load_impedance=50.0)
        self.energy = photon_energy(1550e-9)

    def test_reference_point(self):
        # independent constant-level recomputation of the formula
        e = 1.602176634e-19
        rate = 6e-3 / (6.62607015e-34 * 299792458.0 / 1550e-9)
        expected = 10 * math.log10(
            4 * e ** 2 * rate * 0.9 * 1e5 * 1.6e4 ** 2 / (50 * 1e-3))
        got = shot_noise_power_dbm(self.det, 6e-3, self.energy)
        assert got == pytest.approx(expected, abs=1e-9)
        assert got == pytest.approx(-56.5, abs=0.1)

    def test_power_doubling(self):
        base = shot_noise_power_dbm(self.det, 1.5e-3, self.energy)
        doubled = shot_noise_power_dbm(self.det, 3.0e-3, self.energy)
        assert doubled - base == pytest.approx(3.0102999566398120, abs=1e-9)

    def test_gain_refit(self):
        refit = DetectorModel(quantum_efficiency=0.9,
                              resolution_bandwidth=1e5,
                              transimpedance=1.31e4,
                              load_impedance=50.0)
        drop = (shot_noise_power_dbm(self.det, 6e-3, self.energy)
                - shot_noise_power_dbm(refit, 6e-3, self.energy))
        assert drop == pytest.approx(10 * math.log10((16 / 13.1) ** 2),
                                     abs=1e-9)

    def test_scaling_property(self):
        rng = np.random.Generator(np.random.Philox(3))
        for _ in range(50):
            p = float(rng.uniform(1e-4, 1e-2))
            k = float(rng.uniform(1.1, 30))
            shift = (shot_noise_power_dbm(self.det, k * p, self.energy)
                     - shot_noise_power_dbm(self.det, p, self.energy))
            assert shift == pytest.approx(10 * math.log10(k), abs=1e-9)

    def test_nonpositive_rejected(self):
        with pytest.raises(ValidationError):
            shot_noise_power_dbm(self.det, 0.0, self.energy)


class TestElectronicNoise:
    def test_all_sources_zero(self):
        det = DetectorModel(pd_shunt=1e9, feedback_resistance=1e9,
                            temperature=0.0)
        assert electronic_noise_voltage(det) == 0.0

    def test_voltage_noise_only(self):
        for r in (1e3, 1.6e4, 1e6):
            det = DetectorModel(transimpedance=r, temperature=0.0,
                                tia_voltage_noise=7e-9)
            assert electronic_noise_voltage(det) == pytest.approx(
                7e-9, rel=1e-12)

    def test_term_by_term(self):
        # representative op-amp datasheet numbers
        det = DetectorModel(transimpedance=1.6e4, pd_shunt=5e8,
                            pd_dark_current=1e-12,
                            feedback_resistance=1.6e4,
                            tia_current_noise=2e-12,
                            tia_voltage_noise=5e-9,
                            temperature=296.0)
        k = 1.380649e-23
        density = (4 * k * 296 / 5e8 + (1e-12) ** 2 + 4 * k * 296 / 1.6e4
                   + (2e-12) ** 2 + (5e-9 / 1.6e4) ** 2)
        expected = 1.6e4 * math.sqrt(density)
        assert electronic_noise_voltage(det) == pytest.approx(
            expected, rel=1e-12)


class TestNoiseModel:
    def test_alpha_beta_relation(self):
        model = NoiseModel(148.54, 5.89)
        assert (model.alpha ** 2 + model.beta) / 2 == pytest.approx(
            model.sigma_obs_sq, rel=1e-12)

    def test_invariants_enforced(self):
        with pytest.raises(ValidationError):
            NoiseModel(0.0, 1.0)
        with pytest.raises(ValidationError):
            NoiseModel(1.0, -0.1)
        with pytest.raises(ValidationError):
            NoiseModel(1.0, 1.0, cl_min=1.0, cl_max=0.0)

    def test_excursion(self):
        model = NoiseModel(4.0, 1.0, cl_min=-3.0, cl_max=5.0)
        assert model.excursion == 8.0
        assert model.excursion_sigma == pytest.approx(8.0)
