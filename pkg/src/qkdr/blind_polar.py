"""Interactive polar blind reconciliation.

Alice hides her sifted key under the polar image of a random codeword and
sends the mask; failed list decodes trigger rounds that disclose the next
``delta`` codeword values along the channel-quality ranking, growing the
decoder's frozen set.  Disclosure can continue all the way to the full
frame, so the protocol never fails outright: in the worst case the codeword
becomes fully known and the error pattern is read off directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SeededPrg, binary_entropy
from .polar import (FrozenAssignment, PolarCodeSpec, SclDecodeResult,
                    compose_codeword, polar_transform, scl_decode)


@dataclass(frozen=True, eq=False)
class PolarSessionParams:
    """Configuration of one blind-polar session.  ``prg_seed`` drives
    Alice's private information bits; ``assumed_qber=None`` initializes the
    decoder LLRs at the code's design point."""

    code: PolarCodeSpec
    delta: int
    list_size: int = 64
    prg_seed: int = 0
    assumed_qber: float | None = None

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError(f"delta must be >= 1, got {self.delta}")
        if self.list_size < 1:
            raise ValueError(f"list size must be >= 1, got {self.list_size}")

    def rate_range(self) -> tuple[float, float]:
        """(R_max, 0): disclosure can push the effective rate all the way
        down to zero."""
        return self.code.K / self.code.N, 0.0


def polar_rate_range(params: PolarSessionParams) -> tuple[float, float]:
    return params.rate_range()


def delta_for_parity(delta_ldpc: int, alpha: float) -> int:
    """The polar step size matching an LDPC step for equal per-round
    efficiency increments: round(delta / (1 - alpha)), half to even."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    return round(delta_ldpc / (1.0 - alpha))


@dataclass(frozen=True, eq=False)
class PolarReconciliationRecord:
    success: bool
    verified: bool
    rounds_n: int
    leakage_bits: int
    efficiency_f: float | None
    frame_length: int
    raw_transmitted_bits: int


def _log(transcript, round_no, direction, kind, payload_bits):
    if transcript is not None:
        transcript.append({"round": round_no, "direction": direction,
                           "kind": kind, "payload_bits": payload_bits})


def run_blind_polar(params: PolarSessionParams, x: np.ndarray, y: np.ndarray,
                    true_q: float, transcript: list | None = None,
                    decode_cache: dict | None = None
                    ) -> PolarReconciliationRecord:
    """Run one blind polar reconciliation session on a full sifted frame.

    The mask transmits N raw bits but, following the cited security
    analysis, only N - K + n*delta of them count as leakage (the K random
    information bits reveal nothing); both numbers are recorded.

    ``decode_cache`` may be shared between sessions that differ only in
    ``delta`` (same code, seeds and keys): decode outcomes depend only on
    the disclosure level, so repeated levels are looked up instead of
    recomputed.  Entries map frozen-bit count to the decode result.
    """
    spec = params.code
    N, K, c = spec.N, spec.K, spec.c
    if x.shape != (N,) or y.shape != (N,):
        raise ValueError(f"sifted keys must have length {N}, got "
                         f"{x.shape} and {y.shape}")

    prg = SeededPrg(params.prg_seed)
    info = prg.bits(K)
    base_frozen = FrozenAssignment.along_ranking(spec, N - K - c)
    u = compose_codeword(spec, info, base_frozen)
    v = polar_transform(u)
    w = x ^ v
    _log(transcript, 0, "A->B", "mask", N)
    z = w ^ y

    assumed = params.assumed_qber
    if assumed is None:
        assumed = spec.design_qber

    frozen_count = N - K - c
    disclosed = 0
    n = 0
    while True:
        if frozen_count >= N:
            # everything announced: the error pattern follows directly
            uhat = u
            res = SclDecodeResult(True, uhat, 1)
        else:
            if decode_cache is not None and frozen_count in decode_cache:
                res = decode_cache[frozen_count]
            else:
                assignment = FrozenAssignment.along_ranking(spec, frozen_count,
                                                            u)
                res = scl_decode(spec, z, assignment, assumed,
                                 params.list_size)
                if decode_cache is not None:
                    decode_cache[frozen_count] = res
        if res.success:
            e_hat = z ^ polar_transform(res.decoded_u)
            x_hat = y ^ e_hat
            verified = bool(np.array_equal(x_hat, x))
            _log(transcript, n, "B->A", "success", 0)
            leakage = N - K + disclosed
            eff = None
            if verified and true_q > 0.0:
                eff = leakage / (N * binary_entropy(true_q))
            return PolarReconciliationRecord(
                success=True, verified=verified, rounds_n=n,
                leakage_bits=leakage, efficiency_f=eff, frame_length=N,
                raw_transmitted_bits=N + disclosed)
        _log(transcript, n, "B->A", "failure", 0)
        step = min(params.delta, N - frozen_count)
        frozen_count += step
        disclosed += step
        n += 1
        _log(transcript, n, "A->B", "disclose", step)


def leakage_from_transcript(params: PolarSessionParams, transcript: list) -> int:
    """Recompute the disclosed-information count from the message log: the
    mask is worth its length minus the K hidden random bits, plus every
    disclosed value."""
    spec = params.code
    total = 0
    for msg in transcript:
        if msg["kind"] == "mask":
            total += msg["payload_bits"] - spec.K
        elif msg["kind"] == "disclose":
            total += msg["payload_bits"]
    return total
