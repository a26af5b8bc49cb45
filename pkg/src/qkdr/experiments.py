"""Batch experiment drivers: fixed-QBER sweeps, disclosed-bit CDFs, the
rounds-versus-efficiency tradeoff on a QBER trace, and non-interactive frame
error rates.

Every block derives its own seed from the master seed and the block index,
so results are identical however blocks are scheduled, and aggregation is
order-independent.  Blocks that fail verification count as frame errors and
are excluded from efficiency averages.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .blind_ldpc import LdpcSessionParams, ReconciliationRecord, run_blind_ldpc
from .blind_polar import (PolarReconciliationRecord, PolarSessionParams,
                          delta_for_parity, run_blind_polar)
from .channel import QberTrace, generate_pair
from .core import binary_entropy, derive_seed
from .ldpc import (LdpcCodeSpec, RateAdaptionPlan, bp_syndrome_decode,
                   construct_ldpc_peg, default_degree_sequence, syndrome)
from .polar import (FrozenAssignment, PolarCodeSpec, compose_codeword,
                    construct_polar, polar_transform, scl_decode)
from .core import SeededPrg

SessionParams = LdpcSessionParams | PolarSessionParams

_CHANNEL_STREAM = 0
_PROTOCOL_STREAM = 1


def _sifted_length(params: SessionParams) -> int:
    if isinstance(params, PolarSessionParams):
        return params.code.N
    return params.sifted_length


def run_block(params: SessionParams, q: float, channel_seed: int,
              protocol_seed: int, decode_cache: dict | None = None):
    """Generate one key pair and reconcile it."""
    pair = generate_pair(_sifted_length(params), q, channel_seed)
    p = replace(params, prg_seed=protocol_seed)
    if isinstance(params, PolarSessionParams):
        return run_blind_polar(p, pair.alice, pair.bob, q,
                               decode_cache=decode_cache)
    return run_blind_ldpc(p, pair.alice, pair.bob, q,
                          decode_cache=decode_cache)


# ---------------------------------------------------------------------------
# fixed-QBER sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SweepPoint:
    q: float
    mean_f: float
    mean_rounds: float
    fer: float
    blocks_run: int
    frame_errors: int


@dataclass(frozen=True, eq=False)
class SweepResult:
    per_q: list


def _aggregate(q: float, records) -> SweepPoint:
    ok = [r for r in records if r.success and r.verified]
    errors = len(records) - len(ok)
    fs = [r.efficiency_f for r in ok if r.efficiency_f is not None]
    mean_f = float(np.mean(fs)) if fs else float("nan")
    mean_rounds = float(np.mean([r.rounds_n for r in ok])) if ok else float("nan")
    return SweepPoint(q=q, mean_f=mean_f, mean_rounds=mean_rounds,
                      fer=errors / len(records), blocks_run=len(records),
                      frame_errors=errors)


def _block_batch(args):
    params, q, seeds = args
    return [run_block(params, q, cs, ps) for cs, ps in seeds]


def _run_blocks(params: SessionParams, q: float, seeds, jobs: int):
    if jobs <= 1:
        return [run_block(params, q, cs, ps) for cs, ps in seeds]
    chunks = [(params, q, seeds[i::jobs]) for i in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_block_batch, chunks))
    # re-interleave to block order
    out = [None] * len(seeds)
    for i, chunk in enumerate(results):
        out[i::jobs] = chunk
    return out


def sweep_fixed_qber(params: SessionParams, q_grid, blocks_per_q: int,
                     seed: int, jobs: int = 1) -> SweepResult:
    """Run ``blocks_per_q`` reconciliations at each QBER in the grid."""
    if not len(q_grid):
        raise ValueError("QBER grid is empty")
    if blocks_per_q < 1:
        raise ValueError("need at least one block per grid point")
    points = []
    for qi, q in enumerate(q_grid):
        seeds = [(derive_seed(seed, qi, b, _CHANNEL_STREAM),
                  derive_seed(seed, qi, b, _PROTOCOL_STREAM))
                 for b in range(blocks_per_q)]
        records = _run_blocks(params, q, seeds, jobs)
        points.append(_aggregate(q, records))
    return SweepResult(per_q=points)


# ---------------------------------------------------------------------------
# disclosed-bit CDF
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CdfResult:
    disclosed_bits: np.ndarray
    cdf: np.ndarray
    blocks_run: int


def disclosed_bits_cdf(params: SessionParams, q: float, blocks: int,
                       seed: int, jobs: int = 1) -> CdfResult:
    """Empirical CDF of total disclosed bits over verified-successful
    blocks; the denominator counts every block run, so the curve tops out
    below 1 when some blocks fail."""
    if blocks < 1:
        raise ValueError("need at least one block")
    seeds = [(derive_seed(seed, b, _CHANNEL_STREAM),
              derive_seed(seed, b, _PROTOCOL_STREAM)) for b in range(blocks)]
    records = _run_blocks(params, q, seeds, jobs)
    totals = sorted(r.leakage_bits for r in records if r.success and r.verified)
    values, counts = np.unique(np.array(totals, dtype=np.int64),
                               return_counts=True)
    return CdfResult(disclosed_bits=values,
                     cdf=np.cumsum(counts) / blocks,
                     blocks_run=blocks)


# ---------------------------------------------------------------------------
# rounds-versus-efficiency tradeoff
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TradeoffPoint:
    delta: int
    mean_f: float
    rounds_per_mbit: float


def tradeoff_curve(params: SessionParams, delta_list, trace: QberTrace,
                   seed: int, jobs: int = 1) -> list:
    """One point per step size over the same trace and the same key pairs.

    Block seeds do not involve delta, so every step size sees identical
    keys and identical per-block randomness; for the polar protocol the
    decode outcomes per disclosure level are shared across step sizes.
    """
    if len(trace) == 0:
        raise ValueError("trace is empty")
    qs = trace.per_block_qber
    points = []
    if jobs <= 1:
        # decode outcomes depend only on the disclosure state, never on how
        # rounds were chunked, so blocks share their decode results across
        # the whole delta grid
        caches = [dict() for _ in range(len(trace))]
        for delta in delta_list:
            p_delta = replace(params, delta=int(delta))
            records = []
            for b, q in enumerate(qs):
                records.append(run_block(
                    p_delta, float(q),
                    derive_seed(seed, b, _CHANNEL_STREAM),
                    derive_seed(seed, b, _PROTOCOL_STREAM),
                    decode_cache=caches[b]))
            points.append(_tradeoff_point(int(delta), records))
        return points
    for delta in delta_list:
        p_delta = replace(params, delta=int(delta))
        seeds = [(derive_seed(seed, b, _CHANNEL_STREAM),
                  derive_seed(seed, b, _PROTOCOL_STREAM))
                 for b in range(len(trace))]
        records = []
        if jobs <= 1:
            for (cs, ps), q in zip(seeds, qs):
                records.append(run_block(p_delta, float(q), cs, ps))
        else:
            chunks = [(p_delta, [(cs, ps) for cs, ps in seeds[i::jobs]],
                       qs[i::jobs]) for i in range(jobs)]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_trace_batch, chunks))
            records = [None] * len(seeds)
            for i, chunk in enumerate(results):
                records[i::jobs] = chunk
        points.append(_tradeoff_point(int(delta), records))
    return points


def _trace_batch(args):
    params, seeds, qs = args
    return [run_block(params, float(q), cs, ps)
            for (cs, ps), q in zip(seeds, qs)]


def _tradeoff_point(delta: int, records) -> TradeoffPoint:
    ok = [r for r in records if r.success and r.verified]
    fs = [r.efficiency_f for r in ok if r.efficiency_f is not None]
    mean_f = float(np.mean(fs)) if fs else float("nan")
    total_rounds = sum(r.rounds_n for r in records)
    total_sifted = sum(
        r.frame_length if isinstance(r, PolarReconciliationRecord)
        else r.sifted_block_length for r in records)
    return TradeoffPoint(delta=delta, mean_f=mean_f,
                         rounds_per_mbit=total_rounds / (total_sifted / 1e6))


def matched_session_pair(r_base: float, alpha: float, delta_ldpc: int,
                         design_qber: float, n: int = 11,
                         crc_len: int = 24, list_size: int = 64,
                         use_step5_star: bool = True,
                         ldpc_code: LdpcCodeSpec | None = None,
                         polar_code: PolarCodeSpec | None = None
                         ) -> tuple[LdpcSessionParams, PolarSessionParams]:
    """Build the rate-matched protocol pair the comparison experiments race.

    The polar message size K is the smallest for which the polar round-0
    disclosure rate (N - K)/N does not exceed the LDPC one
    (M - d)/(N - d) -- the integer-budget version of matching the starting
    rates R_base/(1-alpha).  The polar step size is delta/(1-alpha)
    rounded, so each additional round costs the same efficiency increment
    on both sides.
    """
    N = 2 ** n
    if ldpc_code is None:
        M = round((1.0 - r_base) * N)
        profile = "r07" if r_base >= 0.65 else "r06"
        ldpc_code = construct_ldpc_peg(N, M, default_degree_sequence(N, profile))
    if polar_code is None:
        d = round(alpha * N)
        K = N - math.floor(N * (ldpc_code.M - d) / (N - d))
        polar_code = construct_polar(n, K, crc_len, design_qber, method="mc")
    ldpc_params = LdpcSessionParams(code=ldpc_code, alpha=alpha,
                                    delta=delta_ldpc,
                                    use_step5_star=use_step5_star, prg_seed=0)
    polar_params = PolarSessionParams(code=polar_code,
                                      delta=delta_for_parity(delta_ldpc, alpha),
                                      list_size=list_size, prg_seed=0)
    return ldpc_params, polar_params


# ---------------------------------------------------------------------------
# non-interactive frame error rate
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NoninteractivePoint:
    target_f: float
    realized_f: float
    fer: float


def _noninteractive_ldpc_block(code, d, p_count, q, channel_seed, plan_seed,
                               assumed, max_iters):
    N = code.N
    prg = SeededPrg(plan_seed)
    aux = prg.select_positions(range(N), d)
    punctured = np.array(sorted(aux[:p_count]), dtype=np.int64)
    shortened = np.array(sorted(aux[p_count:]), dtype=np.int64)
    sifted_pos = np.setdiff1d(np.arange(N), np.array(sorted(aux)))
    pair = generate_pair(N - d, q, channel_seed)
    fill = SeededPrg(derive_seed(plan_seed, 0xF111)).bits(p_count)
    x_ext = np.zeros(N, dtype=np.uint8)
    x_ext[sifted_pos] = pair.alice
    x_ext[punctured] = fill
    y_ext = np.zeros(N, dtype=np.uint8)
    y_ext[sifted_pos] = pair.bob
    s = syndrome(code, x_ext)
    plan = RateAdaptionPlan(punctured, shortened,
                            np.zeros(shortened.size, dtype=np.uint8))
    res = bp_syndrome_decode(code, y_ext, s, plan, assumed, max_iters)
    return res.success and np.array_equal(res.estimate[sifted_pos], pair.alice)


def noninteractive_fer(targets, q_mean: float, blocks: int, seed: int,
                       family: str, ldpc_pool=None, alpha: float = 0.05,
                       n: int = 11, crc_len: int = 24, list_size: int = 64,
                       max_iters: int = 100, jobs: int = 1) -> list:
    """Single-round FER at each target efficiency.

    For LDPC, picks the pool code and the punctured/shortened split whose
    realized efficiency (M - p) / ((N - d) h(q_mean)) comes closest to the
    target; infeasible targets (no pool code admits 0 <= p <= d) raise.
    For polar, picks the message size K so (N - K) / (N h(q_mean)) matches.
    """
    if family not in ("ldpc", "polar"):
        raise ValueError(f"unknown code family: {family!r}")
    if min(targets) < 1.0:
        raise ValueError("target efficiencies must be >= 1")
    h = binary_entropy(q_mean)
    points = []
    if family == "ldpc":
        if not ldpc_pool:
            raise ValueError("an LDPC code pool is required")
        N = ldpc_pool[0].N
        d = round(alpha * N)
        for ti, target in enumerate(targets):
            best = None
            for code in ldpc_pool:
                p_exact = code.M - target * (N - d) * h
                for p in {math.floor(p_exact), math.ceil(p_exact)}:
                    if not 0 <= p <= d:
                        continue
                    realized = (code.M - p) / ((N - d) * h)
                    gap = abs(realized - target)
                    if best is None or gap < best[0]:
                        best = (gap, code, p, realized)
            if best is None:
                raise ValueError(f"target efficiency {target} infeasible for "
                                 f"the given pool (alpha={alpha})")
            _, code, p, realized = best
            fails = 0
            for b in range(blocks):
                okb = _noninteractive_ldpc_block(
                    code, d, p, q_mean,
                    derive_seed(seed, ti, b, _CHANNEL_STREAM),
                    derive_seed(seed, ti, b, _PROTOCOL_STREAM),
                    q_mean, max_iters)
                fails += not okb
            points.append(NoninteractivePoint(target, realized, fails / blocks))
        return points

    N = 2 ** n
    for ti, target in enumerate(targets):
        K = round(N - target * N * h)
        K = max(1, min(K, N - crc_len))
        realized = (N - K) / (N * h)
        spec = construct_polar(n, K, crc_len, q_mean, method="mc")
        frozen = FrozenAssignment.along_ranking(spec, N - K - crc_len)
        fails = 0
        for b in range(blocks):
            pair = generate_pair(N, q_mean,
                                 derive_seed(seed, ti, b, _CHANNEL_STREAM))
            prg = SeededPrg(derive_seed(seed, ti, b, _PROTOCOL_STREAM))
            u = compose_codeword(spec, prg.bits(K), frozen)
            w = pair.alice ^ polar_transform(u)
            z = w ^ pair.bob
            res = scl_decode(spec, z, frozen, q_mean, list_size)
            ok = (res.success
                  and np.array_equal(pair.bob ^ z ^ polar_transform(res.decoded_u),
                                     pair.alice))
            fails += not ok
        points.append(NoninteractivePoint(target, realized, fails / blocks))
    return points


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def sweep_to_csv(result: SweepResult) -> str:
    lines = ["q,mean_f,mean_rounds,fer,blocks,frame_errors"]
    for p in result.per_q:
        lines.append(",".join(_fmt(v) for v in
                              (p.q, p.mean_f, p.mean_rounds, p.fer,
                               p.blocks_run, p.frame_errors)))
    return "\n".join(lines) + "\n"


def cdf_to_csv(result: CdfResult) -> str:
    lines = ["disclosed_bits,cdf"]
    for v, c in zip(result.disclosed_bits, result.cdf):
        lines.append(f"{int(v)},{_fmt(float(c))}")
    return "\n".join(lines) + "\n"


def tradeoff_to_csv(points) -> str:
    lines = ["delta,mean_f,rounds_per_mbit"]
    for p in points:
        lines.append(",".join(_fmt(v) for v in
                              (p.delta, p.mean_f, p.rounds_per_mbit)))
    return "\n".join(lines) + "\n"


def noninteractive_to_csv(points) -> str:
    lines = ["target_f,realized_f,fer"]
    for p in points:
        lines.append(",".join(_fmt(v) for v in
                              (p.target_f, p.realized_f, p.fer)))
    return "\n".join(lines) + "\n"
