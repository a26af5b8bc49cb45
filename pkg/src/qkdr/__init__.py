"""Blind information reconciliation for QKD sifted keys.

Library plus CLI simulator: interactive rate-adaptive reconciliation with
polar codes (CRC-aided list decoding, incremental disclosure) and LDPC codes
(syndrome decoding with puncturing/shortening), and the experiment drivers
that measure efficiency, round counts, disclosed-bit CDFs and frame error
rates at desk scale.
"""

from .blind_ldpc import (LdpcSessionParams, ReconciliationRecord,
                         effective_rate_range, run_blind_ldpc)
from .blind_polar import (PolarReconciliationRecord, PolarSessionParams,
                          delta_for_parity, polar_rate_range, run_blind_polar)
from .channel import (KeyPair, QberTrace, generate_pair, load_qber_trace,
                      save_qber_trace, synth_fluctuating_trace)
from .core import (CRC24_OPENPGP, BinaryMatrix, Crc24Spec, SeededPrg,
                   binary_entropy, crc24, derive_seed, inverse_binary_entropy,
                   slepian_wolf_floor)
from .ldpc import (BpDecodeResult, LdpcCodeSpec, RateAdaptionPlan,
                   bp_syndrome_decode, construct_ldpc_peg,
                   default_degree_sequence, effective_rate, load_alist,
                   save_alist, syndrome)
from .polar import (FrozenAssignment, PolarCodeSpec, SclDecodeResult,
                    bhattacharyya_profile, compose_codeword, construct_polar,
                    polar_transform, scl_decode)

__version__ = "0.1.0"
