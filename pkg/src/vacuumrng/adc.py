"""n-bit ADC model: bin geometry, saturating quantization and analytic
per-bin probabilities for (shifted) Gaussian inputs.

Bins are indexed i = i_L .. i_M with i_L = -2^(n-1) (all negative
saturation lands here) and i_M = 2^(n-1) - 1 (positive saturation).
Bin width is delta = R / 2^(n-1) and bin centers sit at V_i = i*delta,
so the representable interval is [-R + delta/2, R - 3*delta/2].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .exceptions import ValidationError


@dataclass(frozen=True)
class AdcConfig:
    """Bit depth and half-range of the digitizer.

    Attributes:
        bits: resolution n, 2..24
        range_mv: half-range R in mV (full scale spans about 2R)
    """

    bits: int
    range_mv: float

    def __post_init__(self):
        if not 2 <= self.bits <= 24:
            raise ValidationError("bits must be in [2, 24]")
        if not self.range_mv > 0:
            raise ValidationError("range_mv must be positive")

    @property
    def delta(self) -> float:
        """Bin width R / 2^(n-1), mV."""
        return self.range_mv / 2 ** (self.bits - 1)

    @property
    def i_low(self) -> int:
        return -(2 ** (self.bits - 1))

    @property
    def i_high(self) -> int:
        return 2 ** (self.bits - 1) - 1

    @property
    def n_bins(self) -> int:
        return 2 ** self.bits

    def bin_center(self, index):
        """Center voltage V_i = i*delta of a bin index (scalar or array)."""
        return np.asarray(index) * self.delta

    def lower_sat_edge(self) -> float:
        """Upper edge of the saturated LSB bin: -R + delta/2."""
        return -self.range_mv + 0.5 * self.delta

    def upper_sat_edge(self) -> float:
        """Lower edge of the saturated MSB bin: R - 3*delta/2."""
        return self.range_mv - 1.5 * self.delta

    def interior_edges(self) -> np.ndarray:
        """All 2^n - 1 finite bin edges, ascending."""
        return self.lower_sat_edge() + self.delta * np.arange(self.n_bins - 1)


@dataclass(frozen=True)
class BinDistribution:
    """Probability mass per ADC bin, indexed i_L..i_M (array index 0
    corresponds to i_L). Immutable once built."""

    probs: np.ndarray
    config: AdcConfig

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.shape != (self.config.n_bins,):
            raise ValidationError("probs must have one entry per bin")
        if np.any(p < 0):
            raise ValidationError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValidationError("probabilities must sum to 1 within 1e-12")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    def prob(self, index: int) -> float:
        """Mass of bin `index` (ADC index, i_L..i_M)."""
        return float(self.probs[index - self.config.i_low])

    def max_prob(self) -> float:
        return float(self.probs.max())

    def argmax_index(self) -> int:
        return int(np.argmax(self.probs)) + self.config.i_low


def quantize(v, cfg: AdcConfig):
    """Quantize voltage(s) to bin indices with saturation clamping.

    Interior bin i owns [V_i - delta/2, V_i + delta/2); exact edges
    round toward the upper bin. Off-scale inputs clamp to i_L / i_M.
    """
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValidationError("samples must be finite")
    idx = np.floor(v / cfg.delta + 0.5).astype(np.int64)
    idx = np.clip(idx, cfg.i_low, cfg.i_high)
    if idx.ndim == 0:
        return int(idx)
    return idx


def _gauss_interval_mass(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """P(a < Z <= b) for standard normal, accurate in both tails.

    Evaluated from whichever tail is farther from the mean so that
    masses down to ~1e-300 keep full relative accuracy.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lower = ndtr(b) - ndtr(a)            # accurate when the bin is left of 0
    upper = ndtr(-a) - ndtr(-b)          # accurate when right of 0
    use_upper = (a + b) > 0
    out = np.where(use_upper, upper, lower)
    return np.maximum(out, 0.0)


def bin_probabilities(mean: float, stddev: float, cfg: AdcConfig,
                      shift: float = 0.0) -> BinDistribution:
    """Analytic bin masses of a Gaussian(mean, stddev^2) input.

    `shift` is an offset removed from the signal before digitization
    (equivalently, every bin edge moves up by `shift`), so shifting
    `mean` and `shift` together leaves the masses unchanged.
    """
    if not stddev > 0:
        raise ValidationError("stddev must be positive")
    edges = (cfg.interior_edges() + shift - mean) / stddev
    a = np.concatenate(([-np.inf], edges))
    b = np.concatenate((edges, [np.inf]))
    probs = _gauss_interval_mass(a, b)
    # masses below ~1e-300 may flush to zero; renormalize the residue
    total = probs.sum()
    probs = probs / total
    return BinDistribution(probs=probs, config=cfg)


def offscale_fraction(dist: BinDistribution) -> float:
    """Total mass in the two saturated bins."""
    return float(dist.probs[0] + dist.probs[-1])
