"""Seeded synthesis of raw ADC sample streams and capture statistics.

Each sample is quantize(g_quan + g_cl + drift(t)) where the two noise
terms are independent zero-mean Gaussians and the drift is a slow
offset process confined to [cl_min, cl_max]. Generation uses a Philox
counter-based generator so identical seeds give byte-identical streams
on every platform.

Capture files are headerless little-endian int16 bin indices with a
`<name>.meta` sidecar of key=value lines (bits, range_mv,
sample_rate_hz, and seed when simulated).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .adc import AdcConfig, quantize
from .exceptions import (CalibrationError, InsufficientDataError,
                         ValidationError)
from .noise import NoiseModel, qcnr_db


@dataclass(frozen=True)
class ConstantDrift:
    """Fixed classical offset for the whole capture."""

    offset: float = 0.0

    def offsets(self, count: int, model: NoiseModel,
                rng: np.random.Generator) -> np.ndarray:
        if not model.cl_min <= self.offset <= model.cl_max:
            raise ValidationError("constant offset outside [cl_min, cl_max]")
        return np.full(count, self.offset)


@dataclass(frozen=True)
class SinusoidalDrift:
    """Offset oscillating about the middle of the excursion interval."""

    amplitude: float
    period_samples: float

    def offsets(self, count: int, model: NoiseModel,
                rng: np.random.Generator) -> np.ndarray:
        if self.amplitude < 0 or self.period_samples <= 0:
            raise ValidationError("amplitude >= 0 and period > 0 required")
        if 2.0 * self.amplitude > model.excursion * (1 + 1e-12):
            raise ValidationError("sinusoid exceeds the excursion interval")
        mid = 0.5 * (model.cl_min + model.cl_max)
        t = np.arange(count)
        return mid + self.amplitude * np.sin(2.0 * np.pi * t
                                             / self.period_samples)


@dataclass(frozen=True)
class RandomWalkDrift:
    """Clamped random walk: steps of +-step, reflected into the interval."""

    step: float

    def offsets(self, count: int, model: NoiseModel,
                rng: np.random.Generator) -> np.ndarray:
        if self.step < 0:
            raise ValidationError("step must be nonnegative")
        mid = 0.5 * (model.cl_min + model.cl_max)
        steps = rng.choice((-self.step, self.step), size=count)
        walk = mid + np.cumsum(steps)
        # fold the unbounded walk back into [cl_min, cl_max]
        width = model.excursion
        if width == 0:
            return np.full(count, model.cl_min)
        folded = np.mod(walk - model.cl_min, 2.0 * width)
        folded = np.where(folded > width, 2.0 * width - folded, folded)
        return model.cl_min + folded


@dataclass(frozen=True)
class SimSpec:
    """Everything needed to reproduce one simulated capture."""

    model: NoiseModel
    cfg: AdcConfig
    count: int
    seed: int
    drift: object = ConstantDrift(0.0)

    def __post_init__(self):
        if self.count <= 0:
            raise ValidationError("count must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class CaptureStats:
    """Summary statistics of a capture, in bin-center voltages (mV)."""

    mean: float
    variance: float
    block_means: np.ndarray
    excursion_estimate: float
    offscale_count: int


def generate(spec: SimSpec) -> np.ndarray:
    """Simulate a raw capture; returns int16 bin indices.

    Deterministic in the spec including the seed.
    """
    rng = np.random.Generator(np.random.Philox(spec.seed))
    sigma_q = math.sqrt(spec.model.sigma_quan_sq)
    sigma_c = math.sqrt(spec.model.sigma_cl_sq)
    v = rng.standard_normal(spec.count) * sigma_q
    v += rng.standard_normal(spec.count) * sigma_c
    v += spec.drift.offsets(spec.count, spec.model, rng)
    return quantize(v, spec.cfg).astype(np.int16)


def estimate_stats(samples: np.ndarray, cfg: AdcConfig,
                   block_size: int = 10_000) -> CaptureStats:
    """Mean/variance, per-block means and a slow-drift excursion estimate.

    Block means average out the fast noise so their peak-to-peak spread
    tracks the offset drift rather than the Gaussian tails.
    """
    samples = np.asarray(samples)
    if block_size < 1_000:
        raise InsufficientDataError("block_size must be at least 1000")
    if samples.size < 10 * block_size:
        raise InsufficientDataError(
            "need at least 10 blocks of samples for stable statistics")
    volts = samples.astype(float) * cfg.delta
    n_blocks = samples.size // block_size
    block_means = volts[:n_blocks * block_size].reshape(
        n_blocks, block_size).mean(axis=1)
    offscale = int(np.count_nonzero(
        (samples == cfg.i_low) | (samples == cfg.i_high)))
    return CaptureStats(
        mean=float(volts.mean()),
        variance=float(volts.var(ddof=1)),
        block_means=block_means,
        excursion_estimate=float(block_means.max() - block_means.min()),
        offscale_count=offscale,
    )


def qcnr_from_capture(signal_stats: CaptureStats,
                      dark_stats: CaptureStats) -> float:
    """QCNR from a signal capture and a dark (signal-blocked) capture."""
    if signal_stats.variance <= dark_stats.variance:
        raise CalibrationError(
            "signal variance does not exceed dark variance")
    return qcnr_db(signal_stats.variance - dark_stats.variance,
                   dark_stats.variance)


def write_capture(path, samples: np.ndarray, cfg: AdcConfig,
                  sample_rate_hz: float = 100e6,
                  seed: int | None = None) -> None:
    """Write int16 little-endian samples plus the .meta sidecar."""
    path = Path(path)
    np.asarray(samples, dtype=np.int16).astype("<i2").tofile(path)
    lines = [f"bits={cfg.bits}",
             f"range_mv={cfg.range_mv!r}",
             f"sample_rate_hz={sample_rate_hz!r}"]
    if seed is not None:
        lines.append(f"seed={seed}")
    path.with_suffix(path.suffix + ".meta").write_text(
        "\n".join(lines) + "\n")


def read_capture(path) -> tuple[np.ndarray, dict]:
    """Read a capture file and its sidecar metadata."""
    path = Path(path)
    samples = np.fromfile(path, dtype="<i2")
    meta_path = path.with_suffix(path.suffix + ".meta")
    meta: dict = {}
    if meta_path.exists():
        for line in meta_path.read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            meta[key.strip()] = value.strip()
    return samples, meta


def capture_config(meta: dict) -> AdcConfig:
    """AdcConfig recorded in a sidecar, or an error if absent."""
    try:
        return AdcConfig(int(meta["bits"]), float(meta["range_mv"]))
    except KeyError as exc:
        raise ValidationError(f"capture sidecar missing {exc}") from exc
