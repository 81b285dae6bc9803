"""Worst-case conditional min-entropy of the digitized vacuum signal.

An adversary with full knowledge of the classical noise sees, for each
classical offset V_cl in [cl_min, cl_max], a conditional Gaussian of
width sigma_quan centered at V_cl. The extractable randomness per
sample is -log2 of the largest bin mass the adversary can force by
steering the offset inside its excursion interval. Three candidates
compete: the saturated LSB bin (offset pushed to cl_min), the saturated
MSB bin (offset at cl_max), and the best interior bin (offset parked on
a bin center, or as close as the interval allows).

The half-range that maximizes the entropy balances the worst-case
center-bin mass against the larger of the two saturated-bin masses.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from .adc import AdcConfig, BinDistribution
from .exceptions import BracketingError, ValidationError
from .noise import NoiseModel, sigma_quan_sq_from_clearance

BALANCE_TOL = 1e-9


class ExcursionConvention(enum.Enum):
    """Placement of the offset-excursion interval of width Delta."""

    ONE_SIDED = "one-sided"    # V_cl in [0, Delta]
    SYMMETRIC = "symmetric"    # V_cl in [-Delta/2, +Delta/2]

    def interval(self, delta: float) -> tuple[float, float]:
        if delta < 0:
            raise ValidationError("excursion must be nonnegative")
        if self is ExcursionConvention.ONE_SIDED:
            return 0.0, delta
        return -0.5 * delta, 0.5 * delta


def model_with_excursion(sigma_quan_sq: float, sigma_cl_sq: float,
                         excursion: float,
                         conv: ExcursionConvention) -> NoiseModel:
    """Build a NoiseModel with the excursion interval placed per `conv`."""
    lo, hi = conv.interval(excursion)
    return NoiseModel(sigma_quan_sq=sigma_quan_sq, sigma_cl_sq=sigma_cl_sq,
                      cl_min=lo, cl_max=hi)


@dataclass(frozen=True)
class EntropyReport:
    """Result of a worst-case entropy evaluation at one configuration."""

    h_min: float                 # bits per sample
    optimal_range: float         # half-range R*, mV
    worst_bin: str               # 'LSB', 'center' or 'MSB'
    p_max: float                 # worst-case max bin probability
    clearance_db: float          # dB (inf if sigma_cl_sq == 0)
    qcnr_db: float               # dB (inf if sigma_cl_sq == 0)
    extraction_bound: float      # h_min / bits, bits per raw bit
    excursion_sigma: float       # excursion in multiples of sigma_cl
    bits: int
    convention: str


def min_entropy_plain(dist: BinDistribution) -> float:
    """Min-entropy of a binned distribution, -log2(max bin mass)."""
    return -math.log2(dist.max_prob())


def _candidate_masses(model: NoiseModel, cfg: AdcConfig):
    """Worst-case masses of the three candidate bins.

    Returns (lsb, center, msb) where each entry is the largest mass
    that bin class can attain over V_cl in [cl_min, cl_max].
    """
    sigma = math.sqrt(model.sigma_quan_sq)   # conditional width
    delta = cfg.delta
    lo_edge = cfg.lower_sat_edge()
    hi_edge = cfg.upper_sat_edge()

    # saturated bins: tails grow as the offset is pushed toward them
    lsb = float(ndtr((lo_edge - model.cl_min) / sigma))
    msb = float(ndtr((model.cl_max - hi_edge) / sigma))

    # interior bins: best offset is the nearest reachable bin center.
    # Any center inside the interval attains gap 0; otherwise only the
    # centers bracketing the interval endpoints can win.
    i_min = cfg.i_low + 1
    i_max = cfg.i_high - 1
    candidates = set()
    for x in (model.cl_min, model.cl_max):
        for i in (math.floor(x / delta), math.ceil(x / delta)):
            candidates.add(min(max(i, i_min), i_max))
    inside_lo = max(i_min, math.ceil(model.cl_min / delta))
    inside_hi = min(i_max, math.floor(model.cl_max / delta))
    if inside_lo <= inside_hi:
        candidates.add(inside_lo)
    center = 0.0
    for i in candidates:
        c = i * delta
        mu = min(max(c, model.cl_min), model.cl_max)
        gap = abs(c - mu)
        mass = float(ndtr((gap + 0.5 * delta) / sigma)
                     - ndtr((gap - 0.5 * delta) / sigma))
        center = max(center, mass)
    return lsb, center, msb


def worst_case_max_bin_prob(model: NoiseModel, cfg: AdcConfig,
                            conv: ExcursionConvention | None = None) -> float:
    """Largest bin mass an adversary steering the offset can force.

    If `conv` is given, the model's excursion width is re-placed per
    that convention; otherwise the model's own [cl_min, cl_max] is used.
    """
    if conv is not None:
        model = model_with_excursion(model.sigma_quan_sq, model.sigma_cl_sq,
                                     model.excursion, conv)
    lsb, center, msb = _candidate_masses(model, cfg)
    return max(lsb, center, msb)


def conditional_min_entropy(model: NoiseModel, cfg: AdcConfig,
                            conv: ExcursionConvention | None = None) -> float:
    """Worst-case conditional min-entropy in bits per sample."""
    return -math.log2(worst_case_max_bin_prob(model, cfg, conv))


def _worst_bin_label(model: NoiseModel, cfg: AdcConfig) -> tuple[str, float]:
    lsb, center, msb = _candidate_masses(model, cfg)
    label = max((("LSB", lsb), ("center", center), ("MSB", msb)),
                key=lambda kv: kv[1])
    return label


def optimize_range(model: NoiseModel, bits: int,
                   conv: ExcursionConvention | None = None
                   ) -> tuple[float, EntropyReport]:
    """Half-range R* balancing center-bin and saturated-bin worst cases.

    At the optimum the worst-case center mass equals the larger of the
    two saturated-bin masses, which minimizes the adversary's best bin
    and therefore maximizes the conditional min-entropy.

    Returns (R*, report).

    Raises:
        BracketingError: if no crossing exists (degenerate model).
    """
    if conv is not None:
        model = model_with_excursion(model.sigma_quan_sq, model.sigma_cl_sq,
                                     model.excursion, conv)

    def balance(r: float) -> float:
        lsb, center, msb = _candidate_masses(model, AdcConfig(bits, r))
        return center - max(lsb, msb)

    sigma_obs = math.sqrt(model.sigma_obs_sq)
    lo = sigma_obs
    hi = 10.0 * (sigma_obs + model.excursion)
    # grow the bracket geometrically until the balance changes sign
    for _ in range(200):
        if balance(lo) < 0:
            break
        lo *= 0.5
    else:
        raise BracketingError("could not bracket the range optimum (low side)")
    for _ in range(200):
        if balance(hi) > 0:
            break
        hi *= 2.0
    else:
        raise BracketingError("could not bracket the range optimum (high side)")

    r_star = brentq(balance, lo, hi, xtol=1e-15 * hi, rtol=8.9e-16,
                    maxiter=500)
    if abs(balance(r_star)) > BALANCE_TOL:
        raise BracketingError("range optimum did not converge to tolerance")

    cfg = AdcConfig(bits, r_star)
    worst_bin, p_max = _worst_bin_label(model, cfg)
    h_min = -math.log2(p_max)
    if model.sigma_cl_sq > 0:
        clearance = model.clearance_db()
        qcnr = model.qcnr_db()
    else:
        clearance = math.inf
        qcnr = math.inf
    report = EntropyReport(
        h_min=h_min,
        optimal_range=r_star,
        worst_bin=worst_bin,
        p_max=p_max,
        clearance_db=clearance,
        qcnr_db=qcnr,
        extraction_bound=h_min / bits,
        excursion_sigma=model.excursion_sigma,
        bits=bits,
        convention="model" if conv is None else conv.value,
    )
    return r_star, report


SWEEP_CSV_HEADER = "clearance_db,excursion_sigma,h_min_bits,r_star_mv,worst_bin"


def entropy_vs_clearance_sweep(clearances_db, excursions_sigma, bits: int,
                               conv: ExcursionConvention,
                               sigma_cl_sq: float = 1.0) -> list[dict]:
    """Optimal-range entropy over a clearance x excursion grid.

    The quantum variance at each clearance is (S - 1) * sigma_cl_sq
    with S the linear clearance ratio. Rows come back CSV-ready with
    keys matching SWEEP_CSV_HEADER.
    """
    clearances_db = list(clearances_db)
    excursions_sigma = list(excursions_sigma)
    if not clearances_db or not excursions_sigma:
        raise ValidationError("sweep grids must be non-empty")
    sigma_cl = math.sqrt(sigma_cl_sq)
    rows = []
    for c_db in clearances_db:
        sq = sigma_quan_sq_from_clearance(c_db, sigma_cl_sq)
        for exc in excursions_sigma:
            model = model_with_excursion(sq, sigma_cl_sq,
                                         exc * sigma_cl, conv)
            r_star, report = optimize_range(model, bits)
            rows.append({
                "clearance_db": c_db,
                "excursion_sigma": exc,
                "h_min_bits": report.h_min,
                "r_star_mv": r_star,
                "worst_bin": report.worst_bin,
            })
    return rows


def format_sweep_csv(rows: list[dict]) -> str:
    lines = [SWEEP_CSV_HEADER]
    for row in rows:
        lines.append("{clearance_db:.6g},{excursion_sigma:.6g},"
                     "{h_min_bits:.9g},{r_star_mv:.9g},{worst_bin}"
                     .format(**row))
    return "\n".join(lines) + "\n"


def evaluate_operating_point(sigma_cl_sq: float, excursion_sigma: float,
                             bits: int,
                             stated_qcnr_db: float | None = None,
                             sigma_obs_sq: float | None = None
                             ) -> list[tuple[str, EntropyReport]]:
    """Optimal-range entropy under every QCNR reading x convention combo.

    A stated QCNR and a measured total variance can disagree; rather
    than pick a winner, every combination is evaluated so reports can
    show the spread. Returns (qcnr_source_label, report) pairs.
    """
    if stated_qcnr_db is None and sigma_obs_sq is None:
        raise ValidationError(
            "need a stated QCNR and/or a measured total variance")
    quan_variances = {}
    if stated_qcnr_db is not None:
        quan_variances["stated-qcnr"] = (
            10.0 ** (stated_qcnr_db / 10.0) * sigma_cl_sq)
    if sigma_obs_sq is not None:
        quan_variances["variance-implied"] = sigma_obs_sq - sigma_cl_sq
    sigma_cl = math.sqrt(sigma_cl_sq)
    reports = []
    for source, sq in quan_variances.items():
        if sq <= 0:
            raise ValidationError(f"{source} quantum variance is not positive")
        for conv in ExcursionConvention:
            model = model_with_excursion(sq, sigma_cl_sq,
                                         excursion_sigma * sigma_cl, conv)
            _, report = optimize_range(model, bits, conv)
            reports.append((source, report))
    return reports
