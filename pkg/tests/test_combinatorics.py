"""Tests for exact and asymptotic counting helpers."""

import math

import pytest

from quantlink.combinatorics import (
    RegionCountQuery,
    asymptotic_window,
    binary_entropy,
    log_binomial,
    log_binomial_asymptotic,
    log_partial_binomial_sum,
    max_regions,
)


def exact_log2(value: int) -> float:
    # big-integer log2 oracle, exact to the last float bit
    bits = value.bit_length()
    if bits <= 53:
        return math.log2(value)
    return (bits - 53) + math.log2(value >> (bits - 53))


class TestBinaryEntropy:
    def test_symmetric_maximum(self):
        assert binary_entropy(0.5) == 1.0

    def test_degenerate_ends(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_quarter(self):
        expected = -0.25 * math.log2(0.25) - 0.75 * math.log2(0.75)
        assert binary_entropy(0.25) == pytest.approx(expected, abs=1e-12)
        assert binary_entropy(0.25) == pytest.approx(0.811278, abs=1e-6)

    def test_symmetry(self):
        for p in (0.1, 0.3, 0.42):
            assert binary_entropy(p) == pytest.approx(binary_entropy(1 - p), abs=1e-14)

    @pytest.mark.parametrize("bad", [-0.1, 1.1, 2.0])
    def test_domain_error(self, bad):
        with pytest.raises(ValueError):
            binary_entropy(bad)


class TestMaxRegions:
    @pytest.mark.parametrize(
        "n,d,zero,expected",
        [
            (2, 1, False, 3),
            (4, 2, False, 11),
            (5, 5, False, 32),
            (2, 1, True, 2),
            (3, 1, False, 4),
            (5, 2, True, 10),
        ],
    )
    def test_known_counts(self, n, d, zero, expected):
        assert max_regions(RegionCountQuery(n, d, zero)) == expected

    def test_saturates_at_two_to_n_iff_d_at_least_n(self):
        for n in range(1, 10):
            for d in range(1, 12):
                count = max_regions(RegionCountQuery(n, d, False))
                if d >= n:
                    assert count == 2**n
                else:
                    assert count < 2**n

    def test_monotone_in_both_arguments(self):
        for zero in (False, True):
            for n in range(1, 9):
                for d in range(1, 6):
                    here = max_regions(RegionCountQuery(n, d, zero))
                    assert max_regions(RegionCountQuery(n + 1, d, zero)) >= here
                    assert max_regions(RegionCountQuery(n, d + 1, zero)) >= here

    def test_zero_thresholds_never_gain_regions(self):
        for n in range(1, 12):
            for d in range(1, 8):
                assert max_regions(RegionCountQuery(n, d, True)) <= max_regions(
                    RegionCountQuery(n, d, False)
                )

    def test_invalid_query(self):
        with pytest.raises(ValueError):
            RegionCountQuery(0, 1)
        with pytest.raises(ValueError):
            RegionCountQuery(1, 0)


class TestLogBinomial:
    def test_small_exact(self):
        assert log_binomial(4, 2) == pytest.approx(math.log2(6), abs=1e-12)

    def test_k_zero(self):
        assert log_binomial(10, 0) == pytest.approx(0.0, abs=1e-12)
        assert log_binomial(123456, 0) == pytest.approx(0.0, abs=1e-9)

    def test_against_big_integer_oracle(self):
        for n, k in [(1000, 500), (1000, 3), (5000, 1234), (10000, 5000)]:
            assert log_binomial(n, k) == pytest.approx(
                exact_log2(math.comb(n, k)), abs=1e-9
            )

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            log_binomial(4, 5)
        with pytest.raises(ValueError):
            log_binomial(4, -1)


class TestLogBinomialAsymptotic:
    def test_half_is_explicit(self):
        n = 4096
        expected = n - 0.5 * math.log2(n) - 0.5 * math.log2(math.pi / 2)
        assert log_binomial_asymptotic(n, 0.5) == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("n,lam", [(1024, 0.25), (64, 0.5)])
    def test_close_to_exact(self, n, lam):
        exact = log_binomial(n, int(lam * n))
        assert abs(log_binomial_asymptotic(n, lam) - exact) < 0.5

    def test_window_rejects_boundary(self):
        n = 100
        lo, hi = asymptotic_window(n)
        with pytest.raises(ValueError):
            log_binomial_asymptotic(n, lo)
        with pytest.raises(ValueError):
            log_binomial_asymptotic(n, hi)
        with pytest.raises(ValueError):
            log_binomial_asymptotic(n, lo / 2)
        # strictly inside is fine
        log_binomial_asymptotic(n, 0.5 * (lo + hi))

    def test_gap_bounded_and_not_diverging(self):
        # The additive O(1) term is dropped, so only boundedness is promised.
        for lam in (0.1, 0.25, 0.4, 0.5):
            gaps = []
            for e in range(6, 15):
                n = 2**e
                k = math.floor(lam * n)
                gaps.append(
                    abs(log_binomial(n, k) - log_binomial_asymptotic(n, k / n))
                )
            assert max(gaps) < 1.0
            assert max(gaps[len(gaps) // 2 :]) <= max(gaps[: len(gaps) // 2]) + 0.1


class TestLogPartialBinomialSum:
    def test_eleven_regions_value(self):
        assert log_partial_binomial_sum(4, 2) == pytest.approx(math.log2(11), abs=1e-12)

    def test_full_sum_is_n(self):
        assert log_partial_binomial_sum(10, 10) == pytest.approx(10.0, abs=1e-12)
        assert log_partial_binomial_sum(300, 300) == pytest.approx(300.0, abs=1e-9)

    @pytest.mark.parametrize("n,k", [(200, 50), (256, 100), (300, 40), (500, 250), (961, 600)])
    def test_against_big_integer_oracle(self, n, k):
        exact = exact_log2(sum(math.comb(n, i) for i in range(k + 1)))
        got = log_partial_binomial_sum(n, k)
        assert got == pytest.approx(exact, rel=1e-9)

    def test_partial_sum_ratio_bound(self):
        # sum_{i<=lam n} C(n,i) <= C(n, lam n) * (1-lam)/(1-2lam) for lam < 1/2
        for n in (128, 512, 2048):
            for lam in (0.1, 0.25, 0.4):
                k = math.floor(lam * n)
                gap = log_partial_binomial_sum(n, k) - log_binomial(n, k)
                assert gap >= -1e-9
                assert gap <= math.log2((1 - lam) / (1 - 2 * lam)) + 1e-6

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            log_partial_binomial_sum(4, 5)
        with pytest.raises(ValueError):
            log_partial_binomial_sum(4, -1)
