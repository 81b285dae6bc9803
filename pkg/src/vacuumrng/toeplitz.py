"""Seeded Toeplitz-hash randomness extraction over GF(2).

An m x n binary Toeplitz matrix is defined by an (m+n-1)-bit seed via
T[i][j] = seed[i - j + n - 1]; every descending diagonal is constant.
Multiplying the matrix by an n-bit raw block yields m distilled bits.

The hot path packs matrix rows and input blocks into 64-bit words, so
one output bit costs n/64 AND+XOR word operations plus a parity fold;
a numba kernel runs that loop over whole batches of blocks. Both the
single-block path and the batched kernel are checked bit-for-bit
against the naive double loop in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .exceptions import ValidationError


def _pack_words(bits: np.ndarray) -> np.ndarray:
    """Pack rows of a 2-D bit array into uint64 words (zero padded)."""
    n = bits.shape[-1]
    pad = (-n) % 64
    if pad:
        bits = np.concatenate(
            [bits, np.zeros(bits.shape[:-1] + (pad,), np.uint8)], axis=-1)
    packed = np.packbits(bits, axis=-1)
    return np.ascontiguousarray(packed).view(np.uint64)


@njit(cache=True)
def _gf2_matvec_batch(rows, blocks, out):
    """out[b, i] = parity(rows[i] & blocks[b]), all packed in uint64."""
    n_blocks, n_words = blocks.shape
    m = rows.shape[0]
    for b in range(n_blocks):
        for i in range(m):
            acc = np.uint64(0)
            for w in range(n_words):
                acc ^= rows[i, w] & blocks[b, w]
            acc ^= acc >> np.uint64(32)
            acc ^= acc >> np.uint64(16)
            acc ^= acc >> np.uint64(8)
            acc ^= acc >> np.uint64(4)
            acc ^= acc >> np.uint64(2)
            acc ^= acc >> np.uint64(1)
            out[b, i] = np.uint8(acc & np.uint64(1))


@dataclass(frozen=True)
class ToeplitzExtractor:
    """Immutable m x n Toeplitz hash defined by an (m+n-1)-bit seed."""

    m: int
    n: int
    seed: np.ndarray
    _rows: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        seed = np.array(self.seed, dtype=np.uint8)
        if not 1 <= self.m <= self.n:
            raise ValidationError("need 1 <= m <= n")
        if seed.shape != (self.m + self.n - 1,):
            raise ValidationError(
                f"seed must hold exactly m+n-1 = {self.m + self.n - 1} bits")
        if np.any(seed > 1):
            raise ValidationError("seed entries must be 0/1")
        seed.flags.writeable = False
        object.__setattr__(self, "seed", seed)
        # row i reads the seed backwards from position i+n-1; sliding
        # windows over the reversed seed give all rows at once
        windows = np.lib.stride_tricks.sliding_window_view(
            seed[::-1], self.n)
        rows = _pack_words(np.ascontiguousarray(windows[::-1]))
        rows.flags.writeable = False
        object.__setattr__(self, "_rows", rows)

    def diagonal(self, k: int) -> int:
        """Diagonal value d[k] = T[i][j] for k = i - j."""
        if not -(self.n - 1) <= k <= self.m - 1:
            raise ValidationError("diagonal index out of range")
        return int(self.seed[k + self.n - 1])

    def row(self, i: int) -> np.ndarray:
        """Row i of the matrix, T[i][j] = seed[i - j + n - 1]."""
        if not 0 <= i < self.m:
            raise ValidationError("row index out of range")
        return self.seed[i + self.n - 1::-1][:self.n].copy()


def build(seed, m: int, n: int) -> ToeplitzExtractor:
    """Construct an extractor from a bit array of length m+n-1."""
    return ToeplitzExtractor(m=m, n=n, seed=np.asarray(seed))


def extract_blocks(ex: ToeplitzExtractor, blocks: np.ndarray) -> np.ndarray:
    """Hash a (n_blocks, n) bit matrix to a (n_blocks, m) bit matrix."""
    blocks = np.asarray(blocks, dtype=np.uint8)
    if blocks.ndim != 2 or blocks.shape[1] != ex.n:
        raise ValidationError(f"blocks must be shaped (count, {ex.n})")
    packed = _pack_words(blocks)
    out = np.empty((blocks.shape[0], ex.m), dtype=np.uint8)
    _gf2_matvec_batch(ex._rows, packed, out)
    return out


def extract_block(ex: ToeplitzExtractor, bits) -> np.ndarray:
    """Hash one n-bit block to m bits (GF(2) matrix-vector product)."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape != (ex.n,):
        raise ValidationError(f"input block must hold exactly {ex.n} bits")
    words = _pack_words(bits[None, :])[0]
    acc = np.bitwise_xor.reduce(ex._rows & words, axis=1)
    return (np.bitwise_count(acc) & 1).astype(np.uint8)


@dataclass(frozen=True)
class ExtractionPlan:
    """Block geometry plus the entropy bound it must respect."""

    m: int
    n: int
    bits_per_sample: int
    entropy_bound: float          # bits per raw bit, h_min / bits
    extractor: ToeplitzExtractor | None = None

    def __post_init__(self):
        if self.m > self.n:
            raise ValidationError("need m <= n")
        if self.ratio > self.entropy_bound + 1e-12:
            raise ValidationError(
                f"extraction ratio {self.ratio:.6f} exceeds the entropy "
                f"bound {self.entropy_bound:.6f}")
        if self.extractor is not None and (
                self.extractor.m != self.m or self.extractor.n != self.n):
            raise ValidationError("extractor dimensions do not match plan")

    @property
    def ratio(self) -> float:
        return self.m / self.n

    def with_seed(self, seed) -> "ExtractionPlan":
        """Attach a concrete extractor built from a seed bit array."""
        ex = build(seed, self.m, self.n)
        return ExtractionPlan(self.m, self.n, self.bits_per_sample,
                              self.entropy_bound, ex)


def plan(h_min: float, bits_per_sample: int, target_n: int) -> ExtractionPlan:
    """Size the largest extractor the entropy bound allows.

    m = floor(target_n * h_min / bits_per_sample), clamped to n.
    """
    if h_min <= 0:
        raise ValidationError("no extractable randomness (h_min <= 0)")
    if h_min > bits_per_sample:
        raise ValidationError("h_min cannot exceed bits per sample")
    if target_n <= 0:
        raise ValidationError("block size must be positive")
    m = min(math.floor(target_n * h_min / bits_per_sample), target_n)
    if m < 1:
        raise ValidationError("entropy bound leaves no output bits")
    return ExtractionPlan(m=m, n=target_n, bits_per_sample=bits_per_sample,
                          entropy_bound=h_min / bits_per_sample)


def samples_to_bits(samples: np.ndarray, bits_per_sample: int) -> np.ndarray:
    """Serialize bin indices to offset-binary bits, MSB first.

    Each index is mapped to the unsigned code index - i_L and emitted
    as bits_per_sample bits.
    """
    if not 2 <= bits_per_sample <= 16:
        raise ValidationError("bits_per_sample must be in [2, 16]")
    samples = np.asarray(samples)
    offset = 2 ** (bits_per_sample - 1)
    codes = samples.astype(np.int32) + offset
    if np.any((codes < 0) | (codes >= 2 ** bits_per_sample)):
        raise ValidationError("sample outside the declared bit depth")
    words = codes.astype(">u2").view(np.uint8).reshape(-1, 2)
    bits = np.unpackbits(words, axis=1)
    return np.ascontiguousarray(bits[:, 16 - bits_per_sample:]).reshape(-1)


def extract_stream(plan_: ExtractionPlan, samples: np.ndarray,
                   batch_blocks: int = 4096) -> np.ndarray:
    """Serialize samples, hash complete n-bit blocks, concatenate.

    The trailing partial block is discarded rather than padded, so the
    entropy accounting never dips below the per-block bound. Blocks are
    hashed in batches; output order always follows input order.
    """
    if plan_.extractor is None:
        raise ValidationError("plan has no extractor; attach a seed first")
    raw_bits = samples_to_bits(samples, plan_.bits_per_sample)
    n_blocks = raw_bits.size // plan_.n
    out = np.empty(n_blocks * plan_.m, dtype=np.uint8)
    for start in range(0, n_blocks, batch_blocks):
        stop = min(start + batch_blocks, n_blocks)
        blocks = raw_bits[start * plan_.n: stop * plan_.n].reshape(
            stop - start, plan_.n)
        out[start * plan_.m: stop * plan_.m] = extract_blocks(
            plan_.extractor, blocks).reshape(-1)
    return out


def read_seed_file(path, m: int, n: int) -> np.ndarray:
    """Load an extractor seed: raw bytes, MSB first, exactly
    ceil((m+n-1)/8) bytes; excess trailing bits are ignored."""
    n_bits = m + n - 1
    expected = (n_bits + 7) // 8
    data = np.fromfile(path, dtype=np.uint8)
    if data.size != expected:
        raise ValidationError(
            f"seed file must hold exactly {expected} bytes, got {data.size}")
    return np.unpackbits(data)[:n_bits]


def pack_bits(bits: np.ndarray) -> bytes:
    """Pack a bit stream for file output; first bit = MSB of first byte."""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()
