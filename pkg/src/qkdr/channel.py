"""Sifted-key-pair generation over a BSC, synthetic fluctuating-QBER traces,
and trace file I/O."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SeededPrg, hamming_distance


@dataclass(frozen=True, eq=False)
class KeyPair:
    alice: np.ndarray
    bob: np.ndarray
    realized_error_count: int


def generate_pair(length: int, q: float, seed: int) -> KeyPair:
    """A correlated sifted-key pair: Alice's bits are uniform, Bob's differ
    independently with probability q.  Alice's bits are drawn first, then
    the error uniforms, all from one PRG stream."""
    if not 0.0 <= q < 0.5:
        raise ValueError(f"QBER must be in [0, 0.5), got {q}")
    prg = SeededPrg(seed)
    alice = prg.bits(length)
    errors = (prg.uniforms(length) < q).astype(np.uint8)
    bob = alice ^ errors
    return KeyPair(alice=alice, bob=bob,
                   realized_error_count=hamming_distance(alice, bob))


@dataclass(frozen=True, eq=False)
class QberTrace:
    """A per-block QBER sequence; one entry per sifted-key block."""

    per_block_qber: np.ndarray
    block_length_bits: int = 2048

    def __post_init__(self):
        q = self.per_block_qber
        if q.size and (q.min() < 0.0 or q.max() >= 0.5):
            raise ValueError("trace QBER values must lie in [0, 0.5)")

    def __len__(self):
        return self.per_block_qber.size

    @property
    def mean(self) -> float:
        return float(self.per_block_qber.mean()) if len(self) else 0.0


def _normal(prg: SeededPrg) -> float:
    # Box-Muller, cosine branch; u1 in (0, 1] so the log is finite
    u1 = (prg.next_u64() + 1) * 2.0 ** -64
    u2 = prg.next_u64() * 2.0 ** -64
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def synth_fluctuating_trace(blocks: int, mean_q: float, sigma: float,
                            seed: int, block_length_bits: int = 2048
                            ) -> QberTrace:
    """Mean-reverting random-walk QBER model standing in for a real device
    trace: q <- clamp(q + 0.1 (mean_q - q) + sigma g, 0.001, 0.45), started
    at mean_q, with standard-normal g from the seeded PRG."""
    if not 0.0 < mean_q < 0.5:
        raise ValueError(f"mean QBER must be in (0, 0.5), got {mean_q}")
    if sigma < 0.0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    prg = SeededPrg(seed)
    out = np.empty(blocks)
    q = mean_q
    for t in range(blocks):
        q = q + 0.1 * (mean_q - q) + sigma * _normal(prg)
        q = min(max(q, 0.001), 0.45)
        out[t] = q
    return QberTrace(per_block_qber=out, block_length_bits=block_length_bits)


def load_qber_trace(text: str) -> QberTrace:
    """Parse a trace file: one QBER per line, ``#`` comments, optional
    ``# block_length=<bits>`` header."""
    values = []
    block_length = 2048
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if body.startswith("block_length="):
                try:
                    block_length = int(body.split("=", 1)[1])
                except ValueError:
                    raise ValueError(f"trace line {lineno}: bad block_length")
            continue
        try:
            q = float(stripped)
        except ValueError:
            raise ValueError(f"trace line {lineno}: not a number: {stripped!r}")
        if not 0.0 <= q < 0.5:
            raise ValueError(f"trace line {lineno}: QBER {q} out of [0, 0.5)")
        values.append(q)
    return QberTrace(per_block_qber=np.array(values),
                     block_length_bits=block_length)


def save_qber_trace(trace: QberTrace) -> str:
    lines = [f"# block_length={trace.block_length_bits}",
             f"# mean={trace.mean:.6f}"]
    lines += [f"{q:.8f}" for q in trace.per_block_qber]
    return "\n".join(lines) + "\n"
