"""Tests for channel models, waterfilling and capacity helpers."""

import math

import numpy as np
import pytest

from quantlink.channel import (
    ChannelMatrix,
    PowerAllocation,
    kron_block,
    matrix_from_text,
    matrix_to_text,
    rayleigh_sample,
    shannon_capacity,
    truncated_capacity,
    waterfill,
)


def logdet_capacity(channel: ChannelMatrix, powers: np.ndarray) -> float:
    # Independent oracle: log-det of I + H Q H^T with Q built from the same
    # per-stream powers expressed in the right singular basis.
    q = channel.right.T @ np.diag(powers) @ channel.right
    gram = np.eye(channel.n_r) + channel.entries @ q @ channel.entries.T
    sign, logabs = np.linalg.slogdet(gram)
    assert sign > 0
    return logabs / math.log(2.0)


class TestChannelMatrix:
    def test_svd_reconstruction(self):
        for seed in range(5):
            h = rayleigh_sample(6, 4, seed=seed)
            rebuilt = h.left @ np.diag(h.singular_values) @ h.right
            assert np.linalg.norm(rebuilt - h.entries) <= 1e-9 * np.linalg.norm(h.entries)

    def test_singular_values_sorted(self):
        h = rayleigh_sample(8, 8, seed=1)
        s = h.singular_values
        assert np.all(s[:-1] >= s[1:]) and np.all(s > 0)

    def test_generic_rank(self):
        assert rayleigh_sample(2, 3, seed=1).rank == 2
        assert rayleigh_sample(5, 2, seed=2).rank == 2

    def test_rank_deficient_matrix(self):
        column = np.arange(1.0, 5.0).reshape(-1, 1)
        h = ChannelMatrix(column @ np.array([[1.0, 2.0, 3.0]]))
        assert h.rank == 1

    def test_entry_statistics(self):
        h = rayleigh_sample(100, 100, seed=0)
        assert abs(h.entries.mean()) < 0.05
        assert abs(h.entries.std() - 1.0) < 0.05

    def test_deterministic_per_seed(self):
        assert np.array_equal(rayleigh_sample(3, 3, 9).entries, rayleigh_sample(3, 3, 9).entries)


class TestWaterfill:
    def test_symmetric_split(self):
        alloc = waterfill(np.array([1.0, 1.0]), 2.0)
        assert alloc.per_stream_power == pytest.approx([1.0, 1.0], abs=1e-10)

    def test_weak_stream_shut_off(self):
        alloc = waterfill(np.array([2.0, 1.0]), 0.1)
        assert alloc.per_stream_power[0] == pytest.approx(0.1, abs=1e-10)
        assert alloc.per_stream_power[1] == 0.0

    def test_single_stream(self):
        alloc = waterfill(np.array([1.0]), 5.0)
        assert alloc.per_stream_power == pytest.approx([5.0], abs=1e-10)

    @pytest.mark.parametrize("total", [0.01, 1.0, 1e3, 1e6])
    def test_kkt_conditions(self, total):
        rng = np.random.default_rng(4)
        for _ in range(10):
            sigma = rng.uniform(0.2, 4.0, size=6)
            alloc = waterfill(sigma, total)
            powers = alloc.per_stream_power
            inv = 1.0 / sigma**2
            assert abs(powers.sum() - total) <= 1e-10 * total
            active = powers > 0
            levels = inv[active] + powers[active]
            assert levels.max() - levels.min() <= 1e-8 * max(1.0, levels.max())
            if np.any(~active):
                assert inv[~active].min() >= levels.max() - 1e-8 * max(1.0, levels.max())

    def test_budget_invariant(self):
        with pytest.raises(ValueError):
            PowerAllocation(np.array([1.0, 1.5]), 2.0)
        with pytest.raises(ValueError):
            PowerAllocation(np.array([-0.1, 0.5]), 2.0)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            waterfill(np.array([]), 1.0)
        with pytest.raises(ValueError):
            waterfill(np.array([1.0, -2.0]), 1.0)
        with pytest.raises(ValueError):
            waterfill(np.array([1.0]), 0.0)


class TestCapacity:
    def test_scalar_awgn(self):
        h = ChannelMatrix(np.array([[1.0]]))
        assert shannon_capacity(h, 3.0) == pytest.approx(2.0, abs=1e-9)

    def test_two_symmetric_streams(self):
        h = ChannelMatrix(np.eye(2))
        assert shannon_capacity(h, 2.0) == pytest.approx(2.0, abs=1e-9)

    def test_matches_logdet_oracle(self):
        for seed in range(5):
            h = rayleigh_sample(4, 4, seed=seed)
            alloc = waterfill(h.singular_values, 10.0)
            assert shannon_capacity(h, 10.0) == pytest.approx(
                logdet_capacity(h, alloc.per_stream_power), abs=1e-8
            )

    def test_average_capacity_matches_logdet_oracle_wide(self):
        caps = []
        oracle = []
        for seed in range(20):
            h = rayleigh_sample(32, 16, seed=seed)
            alloc = waterfill(h.singular_values, 1.0)
            caps.append(shannon_capacity(h, 1.0))
            oracle.append(logdet_capacity(h, alloc.per_stream_power))
        assert np.mean(caps) == pytest.approx(np.mean(oracle), abs=1e-8)

    def test_monotone_and_concave_in_power(self):
        h = rayleigh_sample(4, 4, seed=7)
        grid = np.linspace(0.5, 50.0, 40)
        values = np.array([shannon_capacity(h, p) for p in grid])
        assert np.all(np.diff(values) > 0)
        second = np.diff(values, 2)
        assert np.all(second <= 1e-6)

    def test_truncation(self):
        h = ChannelMatrix(np.array([[1.0]]))
        assert truncated_capacity(h, 3.0, 16) == pytest.approx(2.0, abs=1e-9)
        assert truncated_capacity(h, 1e12, 16) == 16.0

    def test_truncation_saturates(self):
        h = rayleigh_sample(4, 4, seed=3)
        values = [truncated_capacity(h, 10.0**e, 8) for e in range(0, 9)]
        assert values[-1] == 8.0
        assert all(b >= a for a, b in zip(values, values[1:]))


class TestKronBlock:
    def test_identity_lift(self):
        h = rayleigh_sample(3, 2, seed=1)
        assert kron_block(h, 1) is h

    def test_rank_multiplies(self):
        h = rayleigh_sample(3, 2, seed=2)
        assert kron_block(h, 3).rank == 3 * h.rank

    def test_singular_values_repeat(self):
        h = rayleigh_sample(3, 2, seed=5)
        lifted = kron_block(h, 4)
        expected = np.sort(np.repeat(h.singular_values, 4))[::-1]
        assert lifted.singular_values == pytest.approx(expected, rel=1e-10)

    def test_frobenius_scaling(self):
        h = rayleigh_sample(4, 3, seed=8)
        lifted = kron_block(h, 5)
        assert np.linalg.norm(lifted.entries) == pytest.approx(
            math.sqrt(5) * np.linalg.norm(h.entries), rel=1e-12
        )


class TestSerialization:
    def test_round_trip(self):
        h = rayleigh_sample(3, 4, seed=6)
        text = matrix_to_text(h)
        back = matrix_from_text(text)
        assert np.array_equal(back.entries, h.entries)
        first = text.splitlines()[0]
        assert first == "3 4"

    def test_malformed_inputs(self):
        with pytest.raises(ValueError):
            matrix_from_text("")
        with pytest.raises(ValueError):
            matrix_from_text("2 2\n1.0 2.0\n")
