"""Closed-form error probability tests: limits, symmetry, cross-checks."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcvdlink import LinkStats, direct_ber, relay_ber, success_probability
from mcvdlink.errors import ThresholdUnsetError


def stats(mu0, var0, mu1, var1, tau):
    return LinkStats(mu0, var0, mu1, var1).with_threshold(tau)


class TestDirectBer:
    def test_half_at_degenerate_stats(self):
        s = stats(100.0, 400.0, 100.0, 400.0, 100.0)
        assert direct_ber(s).p_e == pytest.approx(0.5, abs=1e-12)

    def test_half_at_infinite_thresholds(self):
        s0 = stats(100.0, 400.0, 300.0, 400.0, -1e12)
        s1 = stats(100.0, 400.0, 300.0, 400.0, 1e12)
        assert direct_ber(s0).p_e == pytest.approx(0.5, abs=1e-12)
        assert direct_ber(s1).p_e == pytest.approx(0.5, abs=1e-12)

    def test_vanishes_at_perfect_separation(self):
        s = stats(0.0, 1.0, 1e6, 1.0, 5e5)
        assert direct_ber(s).p_e == pytest.approx(0.0, abs=1e-12)

    def test_matches_q_function_form(self):
        # Equal-prior error rate written through Gaussian tail probabilities.
        s = stats(100.0, 200.0, 300.0, 400.0, 180.0)
        miss = 0.5 * (1 + math.erf((s.threshold - s.mu1) / math.sqrt(2 * s.var1)))
        fa = 0.5 * (1 - math.erf((s.threshold - s.mu0) / math.sqrt(2 * s.var0)))
        assert direct_ber(s).p_e == pytest.approx(0.5 * (miss + fa), rel=1e-12)

    def test_requires_threshold(self):
        with pytest.raises(ThresholdUnsetError):
            direct_ber(LinkStats(100.0, 400.0, 300.0, 400.0))


class TestRelayBer:
    def test_vanishes_at_perfect_separation(self):
        s = stats(0.0, 1.0, 1e6, 1.0, 5e5)
        assert relay_ber(s, s).p_e == pytest.approx(0.0, abs=1e-12)

    def test_half_when_either_hop_degenerate(self):
        good = stats(0.0, 1.0, 1e6, 1.0, 5e5)
        dead = stats(100.0, 400.0, 100.0, 400.0, 100.0)
        assert relay_ber(good, dead).p_e == pytest.approx(0.5, abs=1e-12)
        assert relay_ber(dead, good).p_e == pytest.approx(0.5, abs=1e-12)

    def test_factorizes_over_hops(self):
        # 1/2 - Pe factorizes into the per-hop (1/2 - Pe) terms times 2.
        a = stats(100.0, 200.0, 300.0, 400.0, 180.0)
        b = stats(50.0, 900.0, 250.0, 900.0, 150.0)
        pe = relay_ber(a, b).p_e
        margin_a = 0.5 - direct_ber(a).p_e
        margin_b = 0.5 - direct_ber(b).p_e
        assert 0.5 - pe == pytest.approx(2.0 * margin_a * margin_b, rel=1e-12)

    def test_relay_worse_than_best_hop(self):
        a = stats(100.0, 200.0, 300.0, 400.0, 180.0)
        b = stats(50.0, 900.0, 250.0, 900.0, 150.0)
        pe = relay_ber(a, b).p_e
        assert pe >= max(0.0, direct_ber(a).p_e, direct_ber(b).p_e) - 1e-15


class TestSuccessProbability:
    def test_trivial_endpoints(self):
        assert success_probability(0.0) == pytest.approx(1.0, abs=1e-12)
        assert success_probability(0.5) == pytest.approx(0.0, abs=1e-12)

    def test_relabeling_symmetry(self):
        for p in (0.0, 0.1, 0.37, 0.5, 0.81, 1.0):
            assert success_probability(p) == pytest.approx(
                success_probability(1.0 - p), abs=1e-12
            )

    def test_multi_bit_exponent(self):
        assert success_probability(0.1, bits_per_symbol=3) == pytest.approx(0.8**3, rel=1e-12)

    @given(p=st.floats(0.0, 1.0), n=st.integers(1, 16))
    def test_bounds(self, p, n):
        s = success_probability(p, n)
        assert 0.0 <= s <= 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            success_probability(1.5)
        with pytest.raises(ValueError):
            success_probability(0.1, bits_per_symbol=0)
