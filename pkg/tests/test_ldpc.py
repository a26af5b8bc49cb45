import itertools

import numpy as np
import pytest

from qkdr.core import BinaryMatrix
from qkdr.ldpc import (BpDecodeResult, LdpcCodeSpec, RateAdaptionPlan,
                       bp_syndrome_decode, construct_ldpc_peg,
                       default_degree_sequence, effective_rate, load_alist,
                       save_alist, syndrome)

# N=8 toy parity-check matrix of a distance-5 code: every single- and
# double-error pattern has a unique minimum-weight coset solution, and
# sum-product provably finds it (verified exhaustively below).
TOY_H_D5 = np.array([
    [0, 0, 0, 0, 0, 0, 1, 1],
    [0, 0, 0, 0, 0, 1, 0, 1],
    [0, 0, 0, 1, 1, 0, 0, 0],
    [0, 1, 1, 0, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 1, 0, 0, 1]], dtype=np.uint8)

# N=8, M=4 toy with distinct columns (single errors uniquely decodable).
TOY_H_M4 = np.array([
    [0, 0, 0, 0, 1, 1, 1, 1],
    [0, 1, 1, 1, 0, 0, 0, 1],
    [1, 0, 1, 1, 0, 1, 1, 0],
    [1, 1, 0, 1, 1, 0, 1, 0]], dtype=np.uint8)


def _toy(dense):
    return LdpcCodeSpec(BinaryMatrix.from_dense(dense))


def _coset_min_weight(dense, y, s):
    # exhaustive oracle: all words with H x = s, minimal distance from y
    words = np.array(list(itertools.product([0, 1], repeat=dense.shape[1])),
                     dtype=np.uint8)
    sols = words[((words @ dense.T) % 2 == s).all(axis=1)]
    dists = (sols ^ y).sum(axis=1)
    return int(dists.min())


class TestPeg:
    def test_tiny_complete_graph(self):
        spec = construct_ldpc_peg(4, 2, [2, 2, 2, 2])
        assert np.array_equal(spec.H.to_dense(), np.ones((2, 4), np.uint8))

    def test_no_zero_rows_or_columns(self):
        spec = construct_ldpc_peg(64, 20, [2] * 32 + [3] * 32)
        dense = spec.H.to_dense()
        assert dense.sum(axis=0).min() >= 2
        assert dense.sum(axis=1).min() >= 1

    def test_deterministic(self):
        a = construct_ldpc_peg(48, 16, [3] * 48)
        b = construct_ldpc_peg(48, 16, [3] * 48)
        assert a == b

    def test_column_degrees_respected(self):
        degs = [2] * 10 + [3] * 10 + [5] * 12
        spec = construct_ldpc_peg(32, 12, degs)
        assert sorted(spec.H.to_dense().sum(axis=0)) == sorted(degs)

    def test_base_rate(self):
        spec = construct_ldpc_peg(2048, 614,
                                  default_degree_sequence(2048, "r07"))
        assert spec.base_rate == pytest.approx(1 - 614 / 2048)
        assert spec.M == round(0.3 * 2048) == 614

    def test_infeasible_sequences(self):
        with pytest.raises(ValueError):
            construct_ldpc_peg(4, 2, [1, 2, 2, 2])       # degree < 2
        with pytest.raises(ValueError):
            construct_ldpc_peg(4, 9, [2, 2, 2, 2])       # cannot cover checks
        with pytest.raises(ValueError):
            construct_ldpc_peg(4, 2, [3, 2, 2, 2])       # degree > M

    def test_default_profiles(self):
        r07 = default_degree_sequence(2048, "r07")
        r06 = default_degree_sequence(2048, "r06")
        assert r07.size == r06.size == 2048
        assert np.mean(r06) == pytest.approx(3.5)
        with pytest.raises(ValueError):
            default_degree_sequence(64, "r05")


class TestAlist:
    def test_minimal_matrix(self):
        spec = load_alist("2 1\n2 1\n1 1\n2\n1\n1\n1 2\n")
        assert (spec.N, spec.M) == (2, 1)
        assert np.array_equal(spec.H.to_dense(), [[1, 1]])

    def test_round_trip(self):
        spec = construct_ldpc_peg(32, 12, [2] * 16 + [3] * 16)
        assert load_alist(save_alist(spec)) == spec

    def test_inconsistent_adjacency(self):
        text = save_alist(_toy(TOY_H_M4))
        lines = text.splitlines()
        # tamper with one column list so it no longer matches the rows
        lines[4] = lines[4].replace("3", "2", 1)
        with pytest.raises(ValueError, match="column|degree"):
            load_alist("\n".join(lines))

    def test_parse_error_reports_line(self):
        with pytest.raises(ValueError, match="line"):
            load_alist("2 1\n2 1\nx y\n2\n1\n1\n1 2\n")

    def test_rejects_zero_matrix_rows(self):
        with pytest.raises(ValueError):
            LdpcCodeSpec(BinaryMatrix(2, 4, [[0, 1], []]))


class TestSyndrome:
    def test_zero_key(self):
        spec = _toy(TOY_H_M4)
        assert not syndrome(spec, np.zeros(8, np.uint8)).any()

    def test_linearity(self):
        spec = _toy(TOY_H_D5)
        rng = np.random.default_rng(20)
        for _ in range(50):
            x = rng.integers(0, 2, 8).astype(np.uint8)
            e = rng.integers(0, 2, 8).astype(np.uint8)
            assert np.array_equal(syndrome(spec, x ^ e),
                                  syndrome(spec, x) ^ syndrome(spec, e))

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(21)
        spec = construct_ldpc_peg(64, 24, [2] * 32 + [3] * 32)
        dense = spec.H.to_dense()
        for _ in range(50):
            x = rng.integers(0, 2, 64).astype(np.uint8)
            assert np.array_equal(syndrome(spec, x), (dense @ x) % 2)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            syndrome(_toy(TOY_H_M4), np.zeros(9, np.uint8))


class TestRateAdaption:
    def test_effective_rate_identity(self):
        spec = construct_ldpc_peg(2048, 614,
                                  default_degree_sequence(2048, "r07"))
        rng = np.random.default_rng(22)
        d = 205
        for _ in range(10):
            split = rng.integers(0, d + 1)
            pos = rng.choice(2048, size=d, replace=False)
            plan = RateAdaptionPlan(
                punctured=np.sort(pos[:split]).astype(np.int64),
                shortened=np.sort(pos[split:]).astype(np.int64),
                shortened_values=np.zeros(d - split, np.uint8))
            s_count, p_count = d - split, split
            expected = (2048 - 614 - s_count) / (2048 - s_count - p_count)
            assert effective_rate(spec, plan) == pytest.approx(expected)

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            RateAdaptionPlan(np.array([1, 2]), np.array([2, 3]),
                             np.zeros(2, np.uint8))


class TestBpDecode:
    def test_early_exit_when_consistent(self):
        spec = _toy(TOY_H_M4)
        rng = np.random.default_rng(23)
        x = rng.integers(0, 2, 8).astype(np.uint8)
        res = bp_syndrome_decode(spec, x.copy(), syndrome(spec, x),
                                 RateAdaptionPlan.empty(), 0.05, 100)
        assert res.success
        assert res.iterations_used == 0
        assert np.array_equal(res.estimate, x)

    def test_exhaustive_single_and_double_errors(self):
        # all 36 patterns against the brute-force coset oracle; the code has
        # d=5 so every solution is unique
        spec = _toy(TOY_H_D5)
        for weight in (1, 2):
            for positions in itertools.combinations(range(8), weight):
                e = np.zeros(8, np.uint8)
                e[list(positions)] = 1
                res = bp_syndrome_decode(spec, e.copy(), np.zeros(6, np.uint8),
                                         RateAdaptionPlan.empty(), 0.05, 100)
                assert res.success, positions
                got = int((res.estimate ^ e).sum())
                assert got == _coset_min_weight(TOY_H_D5, e,
                                                np.zeros(6, np.uint8))

    def test_exhaustive_with_random_background(self):
        # gauge shift: same behaviour around arbitrary keys
        spec = _toy(TOY_H_D5)
        dense = TOY_H_D5
        rng = np.random.default_rng(24)
        for _ in range(25):
            x = rng.integers(0, 2, 8).astype(np.uint8)
            e = np.zeros(8, np.uint8)
            e[rng.choice(8, size=rng.integers(1, 3), replace=False)] = 1
            y = x ^ e
            s = syndrome(spec, x)
            res = bp_syndrome_decode(spec, y, s, RateAdaptionPlan.empty(),
                                     0.05, 100)
            assert res.success
            assert np.array_equal(res.estimate, x)

    def test_success_implies_syndrome_match(self):
        spec = construct_ldpc_peg(64, 24, [2] * 32 + [3] * 32)
        rng = np.random.default_rng(25)
        for trial in range(50):
            x = rng.integers(0, 2, 64).astype(np.uint8)
            noise = (rng.random(64) < 0.04).astype(np.uint8)
            s = syndrome(spec, x)
            res = bp_syndrome_decode(spec, x ^ noise, s,
                                     RateAdaptionPlan.empty(), 0.04, 50)
            if res.success:
                assert np.array_equal(syndrome(spec, res.estimate), s)

    def test_shortened_positions_pinned(self):
        spec = construct_ldpc_peg(64, 24, [2] * 32 + [3] * 32)
        rng = np.random.default_rng(26)
        x = rng.integers(0, 2, 64).astype(np.uint8)
        shortened = np.array([3, 17, 40], dtype=np.int64)
        plan = RateAdaptionPlan(np.zeros(0, np.int64), shortened,
                                x[shortened].copy())
        y = x ^ (rng.random(64) < 0.03).astype(np.uint8)
        y[shortened] = x[shortened]
        res = bp_syndrome_decode(spec, y, syndrome(spec, x), plan, 0.03, 100)
        if res.success:
            assert np.array_equal(res.estimate[shortened], x[shortened])

    def test_punctured_recovery(self):
        spec = construct_ldpc_peg(64, 24, [3] * 64)
        rng = np.random.default_rng(27)
        punct = np.array(sorted(rng.choice(64, size=4, replace=False)),
                         dtype=np.int64)
        plan = RateAdaptionPlan(punct, np.zeros(0, np.int64),
                                np.zeros(0, np.uint8))
        x = rng.integers(0, 2, 64).astype(np.uint8)
        y = x.copy()
        y[punct] = 0
        res = bp_syndrome_decode(spec, y, syndrome(spec, x), plan, 0.02, 100)
        assert res.success
        assert np.array_equal(res.estimate, x)

    def test_determinism_including_iterations(self):
        spec = construct_ldpc_peg(64, 24, [2] * 32 + [3] * 32)
        rng = np.random.default_rng(28)
        x = rng.integers(0, 2, 64).astype(np.uint8)
        y = x ^ (rng.random(64) < 0.06).astype(np.uint8)
        s = syndrome(spec, x)
        r1 = bp_syndrome_decode(spec, y, s, RateAdaptionPlan.empty(), 0.06, 100)
        r2 = bp_syndrome_decode(spec, y, s, RateAdaptionPlan.empty(), 0.06, 100)
        assert r1.success == r2.success
        assert r1.iterations_used == r2.iterations_used
        if r1.success:
            assert np.array_equal(r1.estimate, r2.estimate)

    def test_failure_returns_no_estimate(self):
        spec = _toy(TOY_H_M4)
        # an inconsistent, heavily punctured problem that cannot converge
        plan = RateAdaptionPlan(np.arange(8, dtype=np.int64),
                                np.zeros(0, np.int64), np.zeros(0, np.uint8))
        res = bp_syndrome_decode(spec, np.zeros(8, np.uint8),
                                 np.array([1, 0, 1, 0], np.uint8), plan,
                                 0.05, 5)
        assert isinstance(res, BpDecodeResult)
        if not res.success:
            assert res.estimate is None

    def test_bad_inputs(self):
        spec = _toy(TOY_H_M4)
        with pytest.raises(ValueError):
            bp_syndrome_decode(spec, np.zeros(9, np.uint8),
                               np.zeros(4, np.uint8),
                               RateAdaptionPlan.empty(), 0.05, 10)
        with pytest.raises(ValueError):
            bp_syndrome_decode(spec, np.zeros(8, np.uint8),
                               np.zeros(3, np.uint8),
                               RateAdaptionPlan.empty(), 0.05, 10)
        with pytest.raises(ValueError):
            bp_syndrome_decode(spec, np.zeros(8, np.uint8),
                               np.zeros(4, np.uint8),
                               RateAdaptionPlan.empty(), 0.7, 10)
