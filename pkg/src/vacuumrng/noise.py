"""Noise calculus for a balanced homodyne vacuum-noise source.

Relates the directly measurable quantities (total and electronic noise
variances, clearance on a spectrum analyser) to the quantum/classical
noise split, and models the detector electronics: shot-noise power at
the photodiode vs local-oscillator power, and the input-referred
electronic noise of the transimpedance stage.

Unit convention: variances in mV^2 and voltages/offsets in mV at the
model boundary; the detector formulas work in SI units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import BOLTZMANN, ELEMENTARY_CHARGE
from .exceptions import CalibrationError, ValidationError


@dataclass(frozen=True)
class NoiseModel:
    """Quantum/classical noise split plus the offset-excursion interval.

    Attributes:
        sigma_quan_sq: quantum (vacuum) noise variance, mV^2
        sigma_cl_sq: classical (electronic) noise variance, mV^2
        cl_min: lowest classical offset the mean may take, mV
        cl_max: highest classical offset the mean may take, mV
    """

    sigma_quan_sq: float
    sigma_cl_sq: float
    cl_min: float = 0.0
    cl_max: float = 0.0

    def __post_init__(self):
        if not self.sigma_quan_sq > 0:
            raise ValidationError("sigma_quan_sq must be positive")
        if self.sigma_cl_sq < 0:
            raise ValidationError("sigma_cl_sq must be nonnegative")
        if self.cl_min > self.cl_max:
            raise ValidationError("cl_min must not exceed cl_max")

    @property
    def sigma_obs_sq(self) -> float:
        """Total observed variance: sum of the independent components."""
        return self.sigma_quan_sq + self.sigma_cl_sq

    @property
    def alpha(self) -> float:
        """Width parameter of the scaled vacuum quadrature density,
        alpha = sqrt(2 * sigma_quan_sq)."""
        return math.sqrt(2.0 * self.sigma_quan_sq)

    @property
    def beta(self) -> float:
        """Classical broadening parameter, beta = 2 * sigma_cl_sq."""
        return 2.0 * self.sigma_cl_sq

    @property
    def excursion(self) -> float:
        """Peak-to-peak offset excursion, mV."""
        return self.cl_max - self.cl_min

    @property
    def excursion_sigma(self) -> float:
        """Excursion expressed in multiples of the classical stddev."""
        if self.sigma_cl_sq == 0:
            return 0.0 if self.excursion == 0 else math.inf
        return self.excursion / math.sqrt(self.sigma_cl_sq)

    def clearance_db(self) -> float:
        return clearance_db(self.sigma_obs_sq, self.sigma_cl_sq)

    def qcnr_db(self) -> float:
        return qcnr_db(self.sigma_quan_sq, self.sigma_cl_sq)


@dataclass(frozen=True)
class DetectorModel:
    """Physical parameters of the balanced detector and TIA stage (SI).

    Defaults match a 1550 nm InGaAs balanced receiver read out through
    a 16 kV/A transimpedance stage into 50 ohms.
    """

    quantum_efficiency: float = 0.9      # dimensionless
    resolution_bandwidth: float = 1e5    # Hz
    transimpedance: float = 1.6e4        # V/A
    load_impedance: float = 50.0         # ohm
    pd_shunt: float = 1e9                # ohm
    pd_dark_current: float = 0.0         # A (spectral, A/sqrt(Hz) referred)
    feedback_resistance: float = 1.6e4   # ohm
    tia_current_noise: float = 0.0       # A/sqrt(Hz)
    tia_voltage_noise: float = 0.0       # V/sqrt(Hz)
    temperature: float = 296.0           # K

    def __post_init__(self):
        if not 0 < self.quantum_efficiency <= 1:
            raise ValidationError("quantum_efficiency must be in (0, 1]")
        for name in ("resolution_bandwidth", "transimpedance",
                     "load_impedance", "pd_shunt", "feedback_resistance"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if self.temperature < 0:
            raise ValidationError("temperature must be nonnegative")


def clearance_db(sigma_obs_sq: float, sigma_cl_sq: float) -> float:
    """Clearance between total and electronic noise, 10*log10 of the
    variance ratio (the dB gap read on a spectrum analyser).

    Raises:
        CalibrationError: if the total variance falls below the
            electronic variance (miscalibrated inputs).
    """
    if sigma_obs_sq <= 0 or sigma_cl_sq <= 0:
        raise ValidationError("variances must be positive")
    if sigma_obs_sq < sigma_cl_sq:
        raise CalibrationError(
            "total variance below electronic variance; check calibration")
    return 10.0 * math.log10(sigma_obs_sq / sigma_cl_sq)


def qcnr_db(sigma_quan_sq: float, sigma_cl_sq: float) -> float:
    """Quantum-to-classical noise ratio in dB."""
    if sigma_quan_sq <= 0 or sigma_cl_sq <= 0:
        raise ValidationError("variances must be positive")
    return 10.0 * math.log10(sigma_quan_sq / sigma_cl_sq)


def qcnr_from_clearance(clearance_db: float) -> float:
    """QCNR forecast from the spectrum-analyser clearance.

    With S the linear variance ratio, the quantum share is S - 1 times
    the classical variance, so QCNR = 10*log10(S - 1).
    """
    if clearance_db <= 0:
        raise CalibrationError(
            "clearance must be positive: no resolvable quantum noise")
    s_linear = 10.0 ** (clearance_db / 10.0)
    return 10.0 * math.log10(s_linear - 1.0)


def sigma_quan_sq_from_clearance(clearance_db: float,
                                 sigma_cl_sq: float) -> float:
    """Quantum variance implied by a clearance and the classical variance."""
    if sigma_cl_sq <= 0:
        raise ValidationError("sigma_cl_sq must be positive")
    if clearance_db <= 0:
        raise CalibrationError(
            "clearance must be positive: no resolvable quantum noise")
    return (10.0 ** (clearance_db / 10.0) - 1.0) * sigma_cl_sq


def shot_noise_power_dbm(det: DetectorModel, lo_power: float,
                         photon_energy: float) -> float:
    """Shot-noise power in dBm at the TIA output for a given LO power.

    P_dBm = 10*log10( 4 e^2 (P/hv) eta B R^2 / (Z * 1 mW) )

    Args:
        det: detector parameters (SI units)
        lo_power: local-oscillator power on the photodiode, W
        photon_energy: photon energy h*nu, J
    """
    if lo_power <= 0 or photon_energy <= 0:
        raise ValidationError("lo_power and photon_energy must be positive")
    photon_rate = lo_power / photon_energy
    power_w = (4.0 * ELEMENTARY_CHARGE ** 2 * photon_rate
               * det.quantum_efficiency * det.resolution_bandwidth
               * det.transimpedance ** 2) / det.load_impedance
    return 10.0 * math.log10(power_w / 1e-3)


def electronic_noise_voltage(det: DetectorModel) -> float:
    """Input-referred electronic noise at the TIA output, V/sqrt(Hz).

    Sums the power spectral densities of the photodiode thermal and
    dark-current terms, the feedback-resistor thermal term and the
    op-amp current noise, adds the op-amp voltage noise referred to
    the input, and scales by the transimpedance:

    V = R * sqrt( 4kT/R_PD + I_dk^2 + 4kT/R_r + I_c^2 + (V_v/R)^2 )
    """
    kt4 = 4.0 * BOLTZMANN * det.temperature
    density = (kt4 / det.pd_shunt
               + det.pd_dark_current ** 2
               + kt4 / det.feedback_resistance
               + det.tia_current_noise ** 2
               + (det.tia_voltage_noise / det.transimpedance) ** 2)
    return det.transimpedance * math.sqrt(density)
