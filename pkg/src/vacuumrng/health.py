"""Built-in statistical sanity battery for extracted bit streams.

Four standard frequency/structure tests (monobit, block frequency,
runs, cumulative sums) with the usual erfc / incomplete-gamma p-values,
plus two acceptance rules for batteries run over many sequences: the
proportion interval (1-a) +- 3*sqrt((1-a)a/n) on the passing fraction,
and a Kolmogorov-Smirnov uniformity check on the collected p-values.

This is a sanity battery, not a certified test-suite implementation;
full external suites are fed via exported bit files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc, gammaincc, ndtr
from scipy.stats import kstest

from .exceptions import InsufficientDataError, ValidationError

# below this many p-values the KS test switches to the exact
# distribution of the statistic instead of the asymptotic one
_KS_EXACT_BELOW = 35


def _as_bits(bits) -> np.ndarray:
    out = np.asarray(bits, dtype=np.uint8)
    if out.ndim != 1 or np.any(out > 1):
        raise ValidationError("expected a flat array of 0/1 bits")
    return out


def monobit(bits) -> float:
    """Frequency test: are ones and zeros balanced overall?"""
    bits = _as_bits(bits)
    if bits.size < 100:
        raise InsufficientDataError("monobit needs at least 100 bits")
    s = abs(2.0 * int(np.count_nonzero(bits)) - bits.size)
    return float(erfc(s / math.sqrt(2.0 * bits.size)))


def block_frequency(bits, block_size: int = 128) -> float:
    """Frequency within non-overlapping blocks (chi-square)."""
    bits = _as_bits(bits)
    if block_size < 2:
        raise ValidationError("block_size must be at least 2")
    if bits.size < 100 * block_size:
        raise InsufficientDataError(
            "block frequency needs at least 100 blocks")
    n_blocks = bits.size // block_size
    pi = bits[:n_blocks * block_size].reshape(
        n_blocks, block_size).mean(axis=1)
    chi_sq = 4.0 * block_size * float(np.sum((pi - 0.5) ** 2))
    return float(gammaincc(n_blocks / 2.0, chi_sq / 2.0))


def runs(bits) -> float:
    """Total number of runs vs the expectation for independent bits."""
    bits = _as_bits(bits)
    n = bits.size
    if n < 100:
        raise InsufficientDataError("runs needs at least 100 bits")
    pi = float(np.count_nonzero(bits)) / n
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return 0.0  # frequency precheck failed; runs count is meaningless
    v = 1 + int(np.count_nonzero(bits[1:] != bits[:-1]))
    num = abs(v - 2.0 * n * pi * (1.0 - pi))
    den = 2.0 * math.sqrt(2.0 * n) * pi * (1.0 - pi)
    return float(erfc(num / den))


def cusum(bits, forward: bool = True) -> float:
    """Cumulative-sums test: maximal excursion of the +-1 random walk."""
    bits = _as_bits(bits)
    n = bits.size
    if n < 100:
        raise InsufficientDataError("cusum needs at least 100 bits")
    steps = bits.astype(np.int32) * 2 - 1
    if not forward:
        steps = steps[::-1]
    z = int(np.abs(np.cumsum(steps)).max())
    sqrt_n = math.sqrt(n)
    k1 = np.arange(math.floor((-n / z + 1) / 4),
                   math.floor((n / z - 1) / 4) + 1)
    k2 = np.arange(math.floor((-n / z - 3) / 4),
                   math.floor((n / z - 1) / 4) + 1)
    term1 = np.sum(ndtr((4 * k1 + 1) * z / sqrt_n)
                   - ndtr((4 * k1 - 1) * z / sqrt_n))
    term2 = np.sum(ndtr((4 * k2 + 3) * z / sqrt_n)
                   - ndtr((4 * k2 + 1) * z / sqrt_n))
    return float(min(max(1.0 - term1 + term2, 0.0), 1.0))


BATTERY = {
    "monobit": monobit,
    "block_frequency": block_frequency,
    "runs": runs,
    "cusum": cusum,
}


def proportion_interval(alpha: float, n_sequences: int) -> tuple[float, float]:
    """Acceptance interval for the fraction of sequences passing at
    significance alpha: (1-a) +- 3*sqrt((1-a)*a/n)."""
    if not 0 < alpha < 1:
        raise ValidationError("alpha must be in (0, 1)")
    if n_sequences < 1:
        raise ValidationError("need at least one sequence")
    center = 1.0 - alpha
    half_width = 3.0 * math.sqrt((1.0 - alpha) * alpha / n_sequences)
    return center - half_width, center + half_width


def ks_uniformity(p_values) -> float:
    """One-sample KS p-value of a set of p-values against Uniform(0,1)."""
    p_values = np.asarray(p_values, dtype=float)
    if p_values.size < 10:
        raise InsufficientDataError("KS uniformity needs >= 10 p-values")
    if np.any((p_values < 0) | (p_values > 1)):
        raise ValidationError("p-values must lie in [0, 1]")
    mode = "exact" if p_values.size < _KS_EXACT_BELOW else "asymp"
    return float(kstest(p_values, "uniform", mode=mode).pvalue)


@dataclass
class TestReport:
    """Battery outcome over one or more sequences."""

    __test__ = False  # keep pytest from collecting this as a test class

    alpha: float
    n_sequences: int
    p_values: dict[str, list[float]]            # test name -> per-sequence p
    pass_flags: dict[str, list[bool]]
    proportion: tuple[float, float] = field(default=(0.0, 1.0))
    ks_p_values: dict[str, float] = field(default_factory=dict)

    def all_pass(self) -> bool:
        lo, hi = self.proportion
        for name, flags in self.pass_flags.items():
            frac = sum(flags) / len(flags)
            if not lo <= frac <= hi:
                return False
        return True

    def as_text(self) -> str:
        lines = [f"alpha={self.alpha}", f"sequences={self.n_sequences}",
                 f"proportion_interval={self.proportion[0]:.5f},"
                 f"{self.proportion[1]:.5f}"]
        for name in self.p_values:
            flags = self.pass_flags[name]
            frac = sum(flags) / len(flags)
            lines.append(f"{name}.pass_fraction={frac:.4f}")
            if name in self.ks_p_values:
                lines.append(f"{name}.ks_p={self.ks_p_values[name]:.4g}")
        return "\n".join(lines) + "\n"

    def as_csv(self) -> str:
        lines = ["sequence,test,p_value,passed"]
        for name, pvals in self.p_values.items():
            for i, p in enumerate(pvals):
                lines.append(
                    f"{i},{name},{p:.6g},{int(self.pass_flags[name][i])}")
        return "\n".join(lines) + "\n"


def run_battery(sequences, alpha: float = 0.01,
                block_size: int = 128) -> TestReport:
    """Run all four tests on each sequence and aggregate.

    Args:
        sequences: iterable of bit arrays
        alpha: per-test significance level
        block_size: block length for the block-frequency test
    """
    sequences = list(sequences)
    if not sequences:
        raise ValidationError("need at least one sequence")
    p_values: dict[str, list[float]] = {name: [] for name in BATTERY}
    for bits in sequences:
        bits = _as_bits(bits)
        for name, test in BATTERY.items():
            if name == "block_frequency":
                p = test(bits, block_size)
            else:
                p = test(bits)
            p_values[name].append(p)
    pass_flags = {name: [p >= alpha for p in pvals]
                  for name, pvals in p_values.items()}
    ks = {}
    if len(sequences) >= 10:
        ks = {name: ks_uniformity(pvals) for name, pvals in p_values.items()}
    return TestReport(
        alpha=alpha,
        n_sequences=len(sequences),
        p_values=p_values,
        pass_flags=pass_flags,
        proportion=proportion_interval(alpha, len(sequences)),
        ks_p_values=ks,
    )
