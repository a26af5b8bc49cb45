import math

import numpy as np
import pytest

from qkdr.blind_polar import (PolarSessionParams, delta_for_parity,
                              leakage_from_transcript, polar_rate_range,
                              run_blind_polar)
from qkdr.channel import generate_pair
from qkdr.core import binary_entropy, derive_seed, inverse_binary_entropy
from qkdr.polar import construct_polar


@pytest.fixture(scope="module")
def small_spec():
    return construct_polar(9, 300, 24, 0.03, method="mc")


def _params(spec, **kw):
    defaults = dict(code=spec, delta=12, list_size=16, prg_seed=1)
    defaults.update(kw)
    return PolarSessionParams(**defaults)


class TestRateRange:
    def test_matched_rate(self, polar_r07_a01):
        p = _params(polar_r07_a01)
        r_max, r_min = polar_rate_range(p)
        assert r_max == pytest.approx(0.7 / 0.9, abs=1e-3)
        assert r_min == 0.0

    def test_floor_is_always_zero(self, small_spec):
        assert polar_rate_range(_params(small_spec))[1] == 0.0


class TestDeltaParity:
    def test_paper_schedule(self):
        assert delta_for_parity(30, 0.1) == 33

    def test_zero_alpha_identity(self):
        assert delta_for_parity(30, 0.0) == 30

    def test_formula_evaluation(self):
        assert delta_for_parity(40, 0.15) == 47

    def test_bad_alpha(self):
        with pytest.raises(ValueError):
            delta_for_parity(30, 1.0)


class TestNoiselessRun:
    def test_round_zero_and_leakage(self, small_spec):
        p = _params(small_spec)
        pair = generate_pair(small_spec.N, 0.0, 3)
        transcript = []
        rec = run_blind_polar(p, pair.alice, pair.bob, 0.0,
                              transcript=transcript)
        assert rec.success and rec.verified
        assert rec.rounds_n == 0
        assert rec.leakage_bits == small_spec.N - small_spec.K
        assert rec.raw_transmitted_bits == small_spec.N
        assert [m["kind"] for m in transcript] == ["mask", "success"]

    def test_capacity_matched_efficiency_is_one(self):
        # choose K = N (1 - h(q)) exactly; with equal keys the decoder is
        # noiseless and Eq.-style efficiency collapses to 1
        N = 512
        q = inverse_binary_entropy(1 - 300 / N)
        spec = construct_polar(9, 300, 24, max(q, 1e-3), method="mc")
        p = _params(spec)
        pair = generate_pair(N, 0.0, 5)
        rec = run_blind_polar(p, pair.alice, pair.bob, q)
        assert rec.success and rec.rounds_n == 0
        assert rec.efficiency_f == pytest.approx(1.0, abs=1e-9)

    def test_length_mismatch(self, small_spec):
        with pytest.raises(ValueError):
            run_blind_polar(_params(small_spec), np.zeros(3, np.uint8),
                            np.zeros(3, np.uint8), 0.0)


class TestInteractiveRuns:
    def test_transcript_determinism(self, small_spec):
        p = _params(small_spec, prg_seed=77)
        pair = generate_pair(small_spec.N, 0.05, 8)
        t1, t2 = [], []
        r1 = run_blind_polar(p, pair.alice, pair.bob, 0.05, transcript=t1)
        r2 = run_blind_polar(p, pair.alice, pair.bob, 0.05, transcript=t2)
        assert t1 == t2
        assert (r1.rounds_n, r1.leakage_bits) == (r2.rounds_n, r2.leakage_bits)

    def test_leakage_audit(self, small_spec):
        p = _params(small_spec, delta=16)
        h = binary_entropy(0.04)
        for b in range(8):
            pair = generate_pair(small_spec.N, 0.04, derive_seed(6, b))
            transcript = []
            rec = run_blind_polar(p, pair.alice, pair.bob, 0.04,
                                  transcript=transcript)
            assert rec.leakage_bits == leakage_from_transcript(p, transcript)
            if rec.rounds_n * p.delta <= small_spec.K + small_spec.c:
                assert rec.leakage_bits == \
                    small_spec.N - small_spec.K + rec.rounds_n * p.delta
            if rec.verified:
                assert rec.efficiency_f == pytest.approx(
                    rec.leakage_bits / (small_spec.N * h))

    def test_adversarial_noise_terminates_by_disclosure(self):
        spec = construct_polar(6, 30, 24, 0.05)
        p = _params(spec, delta=7, list_size=8)
        pair = generate_pair(64, 0.45, 9)
        rec = run_blind_polar(p, pair.alice, pair.bob, 0.45)
        assert rec.success and rec.verified
        assert rec.rounds_n <= math.ceil((spec.K + spec.c) / p.delta)
        assert rec.efficiency_f >= 1.0

    def test_termination_bound_many_seeds(self, small_spec):
        p = _params(small_spec, delta=31)
        bound = math.ceil((small_spec.K + small_spec.c) / p.delta)
        for b in range(6):
            pair = generate_pair(small_spec.N, 0.2, derive_seed(7, b))
            rec = run_blind_polar(p, pair.alice, pair.bob, 0.2)
            assert rec.success
            assert rec.rounds_n <= bound

    def test_fixed_frame_length(self, small_spec):
        p = _params(small_spec)
        for q in (0.01, 0.08):
            pair = generate_pair(small_spec.N, q, 12)
            rec = run_blind_polar(p, pair.alice, pair.bob, q)
            assert rec.frame_length == small_spec.N

    def test_verified_success_recovers_key(self, small_spec):
        p = _params(small_spec)
        hits = 0
        for b in range(10):
            pair = generate_pair(small_spec.N, 0.03, derive_seed(8, b))
            rec = run_blind_polar(p, pair.alice, pair.bob, 0.03)
            hits += rec.success and rec.verified
        assert hits == 10   # interactive sessions always terminate verified

    def test_decode_cache_transparent(self, small_spec):
        pair = generate_pair(small_spec.N, 0.06, 31)
        records = {}
        for delta in (8, 16):
            p = _params(small_spec, delta=delta, prg_seed=55)
            plain = run_blind_polar(p, pair.alice, pair.bob, 0.06)
            cached = run_blind_polar(p, pair.alice, pair.bob, 0.06,
                                     decode_cache=records.setdefault("c", {}))
            assert (plain.rounds_n, plain.leakage_bits, plain.verified) == \
                   (cached.rounds_n, cached.leakage_bits, cached.verified)


class TestDisclosureOrder:
    def test_frozen_set_follows_ranking(self, small_spec):
        # instrument via transcript: after n rounds the disclosed count is
        # exactly n * delta, and disclosure always extends along the ranking
        p = _params(small_spec, delta=16)
        pair = generate_pair(small_spec.N, 0.055, 14)
        transcript = []
        rec = run_blind_polar(p, pair.alice, pair.bob, 0.055,
                              transcript=transcript)
        discloses = [m for m in transcript if m["kind"] == "disclose"]
        assert len(discloses) == rec.rounds_n
        assert all(m["payload_bits"] == 16 for m in discloses[:-1])
