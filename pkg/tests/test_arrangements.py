"""Tests for the arrangement oracle: sign vectors, LP feasibility, enumeration."""

import itertools
import math

import numpy as np
import pytest

from quantlink.arrangements import (
    Arrangement,
    Hyperplane,
    SignVector,
    default_box_bound,
    enumerate_regions,
    feasible,
    random_general_position,
    sign_vector,
)
from quantlink.combinatorics import RegionCountQuery, max_regions


def two_sided_siso() -> Arrangement:
    # z + 0.5 >= 0 and z - 0.5 >= 0: three intervals on the line
    return Arrangement(
        (Hyperplane(np.array([1.0]), 0.5), Hyperplane(np.array([1.0]), -0.5)), 1
    )


class TestTypes:
    def test_degenerate_normal_rejected(self):
        with pytest.raises(ValueError):
            Hyperplane(np.array([0.0, 0.0]), 1.0)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            Arrangement((Hyperplane(np.array([1.0, 2.0]), 0.0),), 3)

    def test_empty_arrangement_rejected(self):
        with pytest.raises(ValueError):
            Arrangement((), 2)

    def test_sign_vector_entries_checked(self):
        with pytest.raises(ValueError):
            SignVector((1, 0, -1))
        sv = SignVector((1, -1))
        assert list(sv) == [1, -1] and len(sv) == 2 and sv[0] == 1


class TestSignVector:
    def test_between_the_two_thresholds(self):
        assert sign_vector(two_sided_siso(), np.array([0.3])).signs == (1, -1)

    def test_odd_symmetry(self):
        rng = np.random.default_rng(5)
        arrangement = random_general_position(5, 3, False, seed=11)
        mirrored = Arrangement(
            tuple(Hyperplane(hp.normal, -hp.offset) for hp in arrangement.hyperplanes), 3
        )
        for _ in range(50):
            point = rng.standard_normal(3) * 3
            forward = sign_vector(arrangement, point).signs
            backward = sign_vector(mirrored, -point).signs
            assert backward == tuple(-s for s in forward)

    def test_stacked_pair_at_origin(self):
        # Two axis slicers offset +0.5 and two rotated slicers offset -0.5:
        # at the origin the affine values are (.5, .5, -.5, -.5).
        c = math.cos(math.pi / 4)
        planes = (
            Hyperplane(np.array([1.0, 0.0]), 0.5),
            Hyperplane(np.array([0.0, 1.0]), 0.5),
            Hyperplane(np.array([c, c]), -0.5),
            Hyperplane(np.array([-c, c]), -0.5),
        )
        arrangement = Arrangement(planes, 2)
        assert sign_vector(arrangement, np.zeros(2)).signs == (1, 1, -1, -1)

    def test_tie_maps_to_plus_one(self):
        arrangement = Arrangement((Hyperplane(np.array([1.0, 0.0]), 0.0),), 2)
        assert sign_vector(arrangement, np.zeros(2)).signs == (1,)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            sign_vector(two_sided_siso(), np.array([1.0, 2.0]))


class TestFeasible:
    def test_duplicated_plane_conflict(self):
        duplicated = Arrangement(
            (Hyperplane(np.array([1.0]), 0.0), Hyperplane(np.array([1.0]), 0.0)), 1
        )
        assert not feasible(duplicated, SignVector((1, -1)))
        assert feasible(duplicated, SignVector((1, 1)))
        assert feasible(duplicated, SignVector((-1, -1)))

    def test_sampled_points_are_feasible(self):
        rng = np.random.default_rng(2)
        arrangement = random_general_position(6, 3, False, seed=3)
        for _ in range(20):
            point = rng.standard_normal(3) * 2
            assert feasible(arrangement, sign_vector(arrangement, point))

    def test_exactly_eleven_of_sixteen(self):
        arrangement = random_general_position(4, 2, False, seed=1)
        count = sum(
            feasible(arrangement, SignVector(signs))
            for signs in itertools.product((1, -1), repeat=4)
        )
        assert count == 11

    def test_explicit_box_can_clip_far_cells(self):
        # Near-parallel planes push a cell's points beyond any offset-based
        # box; the unbounded default still finds it.
        arrangement = random_general_position(4, 2, False, seed=9)
        bound = default_box_bound(arrangement)
        boxed = {
            signs
            for signs in itertools.product((1, -1), repeat=4)
            if feasible(arrangement, SignVector(signs), bound=bound)
        }
        free = {
            signs
            for signs in itertools.product((1, -1), repeat=4)
            if feasible(arrangement, SignVector(signs))
        }
        assert len(free) == 11
        assert boxed <= free

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            feasible(two_sided_siso(), SignVector((1,)))


class TestEnumerateRegions:
    def test_full_split_when_dimension_dominates(self):
        for n in (2, 3, 4):
            arrangement = random_general_position(n, n + 1, False, seed=n)
            assert len(enumerate_regions(arrangement)) == 2**n

    def test_eleven_regions(self):
        arrangement = random_general_position(4, 2, False, seed=1)
        assert len(enumerate_regions(arrangement)) == 11

    def test_central_five_in_two_dims(self):
        arrangement = random_general_position(5, 2, True, seed=4)
        assert len(enumerate_regions(arrangement)) == 10

    def test_three_points_on_a_line(self):
        arrangement = random_general_position(3, 1, False, seed=7)
        assert len(enumerate_regions(arrangement)) == 4

    def test_size_limit(self):
        arrangement = random_general_position(23, 2, False, seed=0)
        with pytest.raises(ValueError):
            enumerate_regions(arrangement)

    def test_closed_under_sampling(self):
        rng = np.random.default_rng(8)
        for seed in range(5):
            arrangement = random_general_position(6, 2, False, seed=seed)
            regions = enumerate_regions(arrangement)
            for _ in range(100):
                point = rng.uniform(-5, 5, size=2)
                assert sign_vector(arrangement, point) in regions

    def test_count_bracket_general_position(self):
        for seed in range(5):
            for n in range(2, 7):
                for d in (1, 2, 3):
                    arrangement = random_general_position(n, d, False, seed=seed)
                    count = len(enumerate_regions(arrangement))
                    assert n + 1 <= count <= 2**n

    def test_matches_formula_over_seeds(self):
        for zero in (False, True):
            for n in range(1, 7):
                for d in (1, 2, 3):
                    expected = max_regions(RegionCountQuery(n, d, zero))
                    for seed in range(10):
                        arrangement = random_general_position(n, d, zero, seed=seed)
                        assert len(enumerate_regions(arrangement)) == expected, (
                            n, d, zero, seed,
                        )


class TestRandomGeneralPosition:
    def test_zero_threshold_offsets_are_exactly_zero(self):
        arrangement = random_general_position(5, 3, True, seed=123)
        assert np.all(arrangement.offsets == 0.0)

    def test_deterministic_per_seed(self):
        a = random_general_position(4, 2, False, seed=77)
        b = random_general_position(4, 2, False, seed=77)
        assert np.array_equal(a.normals, b.normals)
        assert np.array_equal(a.offsets, b.offsets)

    def test_invalid_sizes(self):
        with pytest.raises(ValueError):
            random_general_position(0, 2, False, seed=0)
        with pytest.raises(ValueError):
            random_general_position(2, 0, False, seed=0)
