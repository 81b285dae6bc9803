"""Entropy evaluation and randomness extraction for vacuum-noise
homodyne random number generators.

Pipeline: model the quantum/classical noise split (`noise`), digitize
(`adc`), evaluate worst-case conditional min-entropy under offset
excursion (`entropy`), simulate or analyze captures (`simulate`),
distill bits with a seeded Toeplitz hash (`toeplitz`) and sanity-check
the output (`health`). The `cli` module wires it all into one tool.
"""

__version__ = "0.1.0"

from .adc import AdcConfig, BinDistribution, bin_probabilities, \
    offscale_fraction, quantize
from .entropy import (EntropyReport, ExcursionConvention,
                      conditional_min_entropy, entropy_vs_clearance_sweep,
                      evaluate_operating_point, min_entropy_plain,
                      model_with_excursion, optimize_range,
                      worst_case_max_bin_prob)
from .exceptions import (BracketingError, CalibrationError,
                         InsufficientDataError, ValidationError)
from .health import (ks_uniformity, monobit, block_frequency, runs, cusum,
                     proportion_interval, run_battery)
from .noise import (DetectorModel, NoiseModel, clearance_db,
                    electronic_noise_voltage, qcnr_db, qcnr_from_clearance,
                    shot_noise_power_dbm, sigma_quan_sq_from_clearance)
from .simulate import (CaptureStats, ConstantDrift, RandomWalkDrift, SimSpec,
                       SinusoidalDrift, capture_config, estimate_stats,
                       generate, qcnr_from_capture, read_capture,
                       write_capture)
from .toeplitz import (ExtractionPlan, ToeplitzExtractor, build,
                       extract_block, extract_stream, plan, samples_to_bits)
