"""Shared bit-level primitives: GF(2) vectors and matrices, binary entropy,
CRC-24, and the deterministic PRG that keeps both protocol parties in sync.

Bit vectors are plain ``numpy`` arrays of dtype ``uint8`` holding 0/1 values;
XOR is the ``^`` operator.  Everything here is a pure function except
:class:`SeededPrg`, which is single-owner mutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1

# xorshift64* multiplier, and the state substituted for an all-zero seed
# (the generator would otherwise be stuck at zero forever).
XORSHIFT_MULT = 0x2545F4914F6CDD1D
ZERO_SEED_STATE = 0x9E3779B97F4A7C15


# ---------------------------------------------------------------------------
# entropy
# ---------------------------------------------------------------------------

def binary_entropy(q: float) -> float:
    """Binary entropy h(q) = -q*log2(q) - (1-q)*log2(1-q), in bits.

    Endpoints return exactly 0.0 (continuity convention 0*log2(0) = 0).

    Raises
    ------
    ValueError
        If q is outside [0, 1].
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"probability out of [0, 1]: {q!r}")
    if q == 0.0 or q == 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def slepian_wolf_floor(frame_length: int, q: float) -> float:
    """Minimum number of disclosed bits below which decoding cannot succeed,
    for a frame of ``frame_length`` bits at crossover probability ``q``."""
    if frame_length < 1:
        raise ValueError(f"frame length must be >= 1, got {frame_length}")
    return frame_length * binary_entropy(q)


def inverse_binary_entropy(h: float) -> float:
    """The q in [0, 0.5] with binary_entropy(q) = h, by bisection."""
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"entropy out of [0, 1]: {h!r}")
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# bit vectors
# ---------------------------------------------------------------------------

def as_bits(values) -> np.ndarray:
    """Coerce a sequence of 0/1 values to a uint8 bit vector."""
    bits = np.asarray(values, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError(f"expected a 1-D bit sequence, got shape {bits.shape}")
    if bits.size and bits.max() > 1:
        raise ValueError("bit vector entries must be 0 or 1")
    return bits


def bytes_to_bits(data: bytes) -> np.ndarray:
    """Expand bytes into bits, most significant bit of each byte first."""
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_int(bits: np.ndarray) -> int:
    """Pack a bit vector into an integer, first bit most significant."""
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def int_to_bits(value: int, width: int) -> np.ndarray:
    """The ``width`` low bits of ``value`` as a bit vector, MSB first."""
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)],
                    dtype=np.uint8)


def hamming_distance(a: np.ndarray, b: np.ndarray) -> int:
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))


# ---------------------------------------------------------------------------
# sparse GF(2) matrices
# ---------------------------------------------------------------------------

class BinaryMatrix:
    """GF(2) matrix stored sparse-by-row.

    ``row_support[i]`` lists the column indices of the ones in row i.
    """

    def __init__(self, rows: int, cols: int, row_support):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(row_support) != rows:
            raise ValueError(f"expected {rows} rows, got {len(row_support)}")
        support = []
        for i, idx in enumerate(row_support):
            arr = np.asarray(sorted(set(int(j) for j in idx)), dtype=np.int32)
            if arr.size and (arr[0] < 0 or arr[-1] >= cols):
                raise ValueError(f"row {i}: column index out of [0, {cols})")
            support.append(arr)
        self.rows = rows
        self.cols = cols
        self.row_support = tuple(support)

    @classmethod
    def from_dense(cls, dense) -> "BinaryMatrix":
        dense = np.asarray(dense)
        rows, cols = dense.shape
        support = [np.flatnonzero(dense[i] % 2) for i in range(rows)]
        return cls(rows, cols, support)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, idx in enumerate(self.row_support):
            dense[i, idx] = 1
        return dense

    def multiply(self, v: np.ndarray) -> np.ndarray:
        """Matrix-vector product over GF(2)."""
        if v.shape != (self.cols,):
            raise ValueError(f"vector length {v.shape} != {self.cols}")
        out = np.empty(self.rows, dtype=np.uint8)
        for i, idx in enumerate(self.row_support):
            out[i] = int(v[idx].sum()) & 1
        return out

    def __eq__(self, other):
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return (self.rows == other.rows and self.cols == other.cols
                and all(np.array_equal(a, b)
                        for a, b in zip(self.row_support, other.row_support)))


# ---------------------------------------------------------------------------
# CRC-24
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Crc24Spec:
    """A 24-bit CRC: polynomial (without the leading x^24 term) and initial
    register value.  The default is the OpenPGP CRC-24, a published and
    externally checkable parametrisation."""

    polynomial: int = 0x864CFB
    initial_register: int = 0xB704CE
    width: int = 24


CRC24_OPENPGP = Crc24Spec()


def crc24(message_bits, spec: Crc24Spec = CRC24_OPENPGP) -> int:
    """CRC of a bit sequence (MSB-first order) by GF(2) long division."""
    width = spec.width
    mask = (1 << width) - 1
    top = width - 1
    reg = spec.initial_register & mask
    for bit in message_bits:
        feedback = ((reg >> top) & 1) ^ int(bit)
        reg = (reg << 1) & mask
        if feedback:
            reg ^= spec.polynomial
    return reg


def crc24_contribution_table(length: int,
                             spec: Crc24Spec = CRC24_OPENPGP):
    """Per-bit CRC contributions for fixed-length messages.

    The CRC register update is affine in the message bits, so for messages of
    a fixed length the CRC splits into a constant (the CRC of the all-zero
    message) plus an XOR of one precomputed term per set bit.  Returns
    ``(zero_crc, table)`` with ``table[i]`` the term for message bit i.
    """
    width = spec.width
    mask = (1 << width) - 1
    top = width - 1

    def step(reg):
        feedback = (reg >> top) & 1
        reg = (reg << 1) & mask
        if feedback:
            reg ^= spec.polynomial
        return reg

    table = np.zeros(length, dtype=np.uint32)
    if length:
        # contribution of bit i depends only on its distance from the end:
        # it is x^(length-1-i+width) mod g(x), built up one shift at a time
        r = spec.polynomial  # x^width mod g(x)
        table[length - 1] = r
        for dist in range(1, length):
            r = step(r)
            table[length - 1 - dist] = r
    zero = spec.initial_register & mask
    for _ in range(length):
        zero = step(zero)
    return zero, table


def crc24_from_table(bits: np.ndarray, zero_crc: int, table: np.ndarray) -> int:
    """CRC via a contribution table from :func:`crc24_contribution_table`."""
    if bits.size != table.size:
        raise ValueError("table length does not match message length")
    if bits.size == 0:
        return zero_crc
    return int(np.bitwise_xor.reduce(table[bits != 0], initial=zero_crc))


# ---------------------------------------------------------------------------
# deterministic PRG
# ---------------------------------------------------------------------------

@njit(cache=True)
def _xorshift_fill(state, out):
    s = state
    for i in range(out.size):
        s ^= s >> np.uint64(12)
        s ^= (s << np.uint64(25)) & np.uint64(0xFFFFFFFFFFFFFFFF)
        s ^= s >> np.uint64(27)
        out[i] = (s * np.uint64(0x2545F4914F6CDD1D)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    return s


class SeededPrg:
    """xorshift64* generator, bit-exact across platforms.

    Both protocol parties run one of these from a shared seed so that position
    choices stay synchronized without extra messages.  Not cryptographic; the
    choices it drives are public anyway.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        state = seed & MASK64
        self.state = state if state != 0 else ZERO_SEED_STATE

    def next_u64(self) -> int:
        s = self.state
        s ^= s >> 12
        s = (s ^ (s << 25)) & MASK64
        s ^= s >> 27
        self.state = s
        return (s * XORSHIFT_MULT) & MASK64

    def next_words(self, count: int) -> np.ndarray:
        """A batch of ``count`` raw 64-bit outputs (same stream as
        :meth:`next_u64`, just generated in a compiled loop)."""
        out = np.empty(count, dtype=np.uint64)
        if count:
            self.state = int(_xorshift_fill(np.uint64(self.state), out))
        return out

    def bits(self, count: int) -> np.ndarray:
        """``count`` bits; each 64-bit output is consumed MSB first."""
        if count == 0:
            return np.zeros(0, dtype=np.uint8)
        words = self.next_words((count + 63) // 64)
        unpacked = np.unpackbits(words.astype(">u8").view(np.uint8))
        return unpacked[:count]

    def uniform(self) -> float:
        """One float in [0, 1)."""
        return self.next_u64() / 2.0 ** 64

    def uniforms(self, count: int) -> np.ndarray:
        return self.next_words(count).astype(np.float64) * 2.0 ** -64

    def select_positions(self, candidates, k: int) -> list:
        """Choose ``k`` distinct entries by repeated modular draws.

        Each draw picks index ``next_u64() % remaining`` in a working copy of
        the candidate list and removes it (a partial Fisher-Yates shuffle),
        so the result is fully determined by the seed and candidate order.
        """
        work = [int(c) for c in candidates]
        if k > len(work):
            raise ValueError(f"cannot select {k} from {len(work)} candidates")
        chosen = []
        for _ in range(k):
            i = self.next_u64() % len(work)
            chosen.append(work.pop(i))
        return chosen


def splitmix64(x: int) -> int:
    """The splitmix64 finalizer; used to derive independent seeds."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *parts: int) -> int:
    """Derive a child seed from a master seed and integer labels.

    Used by the experiment drivers to give every block its own seed so that
    results do not depend on execution order or parallelism.
    """
    s = master & MASK64
    for p in parts:
        s = splitmix64(s ^ splitmix64(p & MASK64))
    return s
