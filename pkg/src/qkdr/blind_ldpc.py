"""Interactive LDPC blind reconciliation.

Both parties extend their sifted keys with punctured bits, Alice sends one
syndrome, and failed decodes trigger incremental disclosure rounds: punctured
bits become shortened first, and (optionally) sifted bits are disclosed once
the punctured budget runs out.  Both roles run in-process; the synchronized
PRG mirrors what two real endpoints would derive from the shared seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SeededPrg, binary_entropy, derive_seed, inverse_binary_entropy
from .ldpc import (DEFAULT_MAX_ITERS, LdpcCodeSpec, RateAdaptionPlan,
                   bp_syndrome_decode, syndrome)

_ALICE_FILL_TAG = 0xA11CE


@dataclass(frozen=True, eq=False)
class LdpcSessionParams:
    """Configuration of one blind-LDPC session.

    ``alpha`` sets the auxiliary-bit budget d = round(alpha * N) (the paper
    treats alpha*N as an integer; N=2048 with the published alpha values is
    not, so the rounded budget is the operational quantity).  ``delta`` bits
    are disclosed per additional round.  ``assumed_qber=None`` uses the
    midpoint of the code's rate-adaption band.
    """

    code: LdpcCodeSpec
    alpha: float
    delta: int
    use_step5_star: bool
    prg_seed: int
    assumed_qber: float | None = None
    max_iters: int = DEFAULT_MAX_ITERS

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.delta < 1:
            raise ValueError(f"delta must be >= 1, got {self.delta}")

    @property
    def aux_count(self) -> int:
        return round(self.alpha * self.code.N)

    @property
    def sifted_length(self) -> int:
        return self.code.N - self.aux_count

    def rate_range(self) -> tuple[float, float]:
        """(R_max, R_min): the effective-rate span of the adaption, from all
        d bits punctured down to all d shortened.  Step 5* extends below
        R_min in practice by disclosing sifted positions."""
        N, M, d = self.code.N, self.code.M, self.aux_count
        return (N - M) / (N - d), (N - M - d) / (N - d)

    def band_midpoint_qber(self) -> float:
        r_max, r_min = self.rate_range()
        return 0.5 * (inverse_binary_entropy(1.0 - r_max)
                      + inverse_binary_entropy(1.0 - r_min))


def effective_rate_range(params: LdpcSessionParams) -> tuple[float, float]:
    return params.rate_range()


@dataclass(frozen=True, eq=False)
class ReconciliationRecord:
    success: bool
    verified: bool
    rounds_n: int
    leakage_bits: int
    efficiency_f: float | None
    sifted_block_length: int
    true_qber_used: float
    raw_transmitted_bits: int


def _log(transcript, round_no, direction, kind, payload_bits):
    if transcript is not None:
        transcript.append({"round": round_no, "direction": direction,
                           "kind": kind, "payload_bits": payload_bits})


def run_blind_ldpc(params: LdpcSessionParams, x: np.ndarray, y: np.ndarray,
                   true_q: float, transcript: list | None = None,
                   decode_cache: dict | None = None) -> ReconciliationRecord:
    """Run one blind reconciliation session on a sifted key pair.

    Round 0 punctures d positions (shared PRG), fills Alice's copies with
    private random bits and sends the syndrome.  Each failed decode converts
    delta punctured positions to shortened ones (values announced); with
    Step 5* enabled, once fewer than delta punctured positions remain, delta
    undisclosed sifted positions are announced instead.  The session fails
    when neither conversion is possible.

    Position draws are prefix-consistent across step sizes: every draw
    removes one candidate, so after any total of j announcements the PRG
    state and the announced set do not depend on how the rounds were
    chunked.  ``decode_cache`` exploits that: sessions differing only in
    ``delta`` (same code, seeds, keys) may share a dict mapping
    (converted, disclosed) counts to decode results.

    Leakage follows the M - d + n*delta convention whichever kind of bits
    the rounds disclosed; the raw transmitted volume (syndrome plus
    announcements) is reported separately.
    """
    code = params.code
    N, M = code.N, code.M
    d = params.aux_count
    sifted_len = N - d
    if x.shape != (sifted_len,) or y.shape != (sifted_len,):
        raise ValueError(f"sifted keys must have length {sifted_len}, got "
                         f"{x.shape} and {y.shape}")

    shared_prg = SeededPrg(params.prg_seed)
    punctured = np.array(sorted(shared_prg.select_positions(range(N), d)),
                         dtype=np.int64)
    sifted_pos = np.setdiff1d(np.arange(N), punctured)

    fill = SeededPrg(derive_seed(params.prg_seed, _ALICE_FILL_TAG)).bits(d)
    x_ext = np.zeros(N, dtype=np.uint8)
    x_ext[sifted_pos] = x
    x_ext[punctured] = fill
    y_ext = np.zeros(N, dtype=np.uint8)
    y_ext[sifted_pos] = y

    s = syndrome(code, x_ext)
    _log(transcript, 0, "A->B", "syndrome", M)

    assumed = params.assumed_qber
    if assumed is None:
        assumed = params.band_midpoint_qber()

    punct_left = list(punctured)
    shortened: list[int] = []
    shortened_vals: list[int] = []
    sifted_undisclosed = list(sifted_pos)
    converted = 0
    disclosed = 0

    n = 0
    while True:
        if decode_cache is not None and (converted, disclosed) in decode_cache:
            res = decode_cache[(converted, disclosed)]
        else:
            plan = RateAdaptionPlan(np.array(punct_left, dtype=np.int64),
                                    np.array(shortened, dtype=np.int64),
                                    np.array(shortened_vals, dtype=np.uint8))
            res = bp_syndrome_decode(code, y_ext, s, plan, assumed,
                                     params.max_iters)
            if decode_cache is not None:
                decode_cache[(converted, disclosed)] = res
        if res.success:
            recovered = res.estimate[sifted_pos]
            verified = bool(np.array_equal(recovered, x))
            _log(transcript, n, "B->A", "success", 0)
            leakage = M - d + n * params.delta
            eff = None
            if verified and true_q > 0.0:
                eff = leakage / (sifted_len * binary_entropy(true_q))
            return ReconciliationRecord(
                success=True, verified=verified, rounds_n=n,
                leakage_bits=leakage, efficiency_f=eff,
                sifted_block_length=sifted_len, true_qber_used=true_q,
                raw_transmitted_bits=M + n * params.delta)

        _log(transcript, n, "B->A", "failure", 0)
        if len(punct_left) >= params.delta:
            chosen = shared_prg.select_positions(sorted(punct_left),
                                                 params.delta)
            for p in chosen:
                punct_left.remove(p)
                shortened.append(p)
                shortened_vals.append(int(x_ext[p]))
                y_ext[p] = x_ext[p]
            converted += params.delta
            n += 1
            _log(transcript, n, "A->B", "shorten_punctured", params.delta)
        elif params.use_step5_star and len(sifted_undisclosed) >= params.delta:
            chosen = shared_prg.select_positions(sorted(sifted_undisclosed),
                                                 params.delta)
            for p in chosen:
                sifted_undisclosed.remove(p)
                shortened.append(p)
                shortened_vals.append(int(x_ext[p]))
                y_ext[p] = x_ext[p]
            disclosed += params.delta
            n += 1
            _log(transcript, n, "A->B", "shorten_sifted", params.delta)
        else:
            leakage = M - d + n * params.delta
            return ReconciliationRecord(
                success=False, verified=False, rounds_n=n,
                leakage_bits=leakage, efficiency_f=None,
                sifted_block_length=sifted_len, true_qber_used=true_q,
                raw_transmitted_bits=M + n * params.delta)


def leakage_from_transcript(params: LdpcSessionParams, transcript: list) -> int:
    """Recompute the disclosed-information count independently from the
    message log: syndrome bits, minus the punctured allowance, plus every
    announced value."""
    total = 0
    for msg in transcript:
        if msg["kind"] == "syndrome":
            total += msg["payload_bits"] - params.aux_count
        elif msg["kind"] in ("shorten_punctured", "shorten_sifted"):
            total += msg["payload_bits"]
    return total
