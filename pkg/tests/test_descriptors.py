import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cden.descriptors import (
    DescriptorKind,
    DescriptorRecord,
    choose_circle_count,
    circle_count_from_means,
    extract_descriptor,
    improved_entropy,
    mean_neighborhood_count,
    shannon_entropy,
)
from cden.exceptions import EmptyCorpusError, InvalidInputError
from oracles import entropy_bits, flood_fill_sizes, ring_counts_loop, weighted_entropy

KINDS = list(DescriptorKind)

# bin 1 -> 2 neighborhoods, bin 2 -> 4 (the (0, 4)/(1, 3) diagonal is NE/SW and does not link)
TWO_AND_FOUR = np.array([
    [2, 1, 2, 1, 2, 1, 2],
    [1, 1, 1, 2, 1, 1, 1],
])


def random_bin_map(seed, shape=(16, 16), n_bins=4):
    return np.random.default_rng(seed).integers(0, n_bins, shape)


probability_vectors = st.lists(st.floats(0, 1), min_size=1, max_size=12).filter(lambda xs: sum(xs) > 0).map(
    lambda xs: [x / math.fsum(xs) for x in xs]
)


class TestShannonEntropy:
    def test_degenerate(self):
        assert shannon_entropy([1.0]) == 0.0

    def test_uniform_pair(self):
        assert shannon_entropy([0.5, 0.5]) == 1.0

    def test_quarter_three_quarters(self):
        assert shannon_entropy([0.25, 0.75]) == pytest.approx(0.8112781244591328, abs=1e-12)

    def test_zero_terms_vanish(self):
        assert shannon_entropy([0.0, 1.0, 0.0]) == 0.0

    @pytest.mark.parametrize("p", [[0.5, 0.6], [1.2, -0.2], [], [float("nan"), 1.0]])
    def test_rejects_invalid(self, p):
        with pytest.raises(InvalidInputError):
            shannon_entropy(p)

    @pytest.mark.parametrize("n", [1, 2, 3, 7, 10, 128])
    def test_uniform_hits_upper_bound(self, n):
        assert shannon_entropy([1 / n] * n) == pytest.approx(math.log2(n), abs=1e-12)

    @given(probability_vectors)
    def test_bounds_and_oracle(self, p):
        h = shannon_entropy(p)
        assert 0 <= h <= math.log2(len(p))
        assert h == pytest.approx(entropy_bits(p), abs=1e-12)

    @given(probability_vectors, st.randoms())
    def test_permutation_invariant(self, p, rnd):
        q = list(p)
        rnd.shuffle(q)
        assert shannon_entropy(q) == pytest.approx(shannon_entropy(p), abs=1e-12)


class TestImprovedEntropy:
    def test_single_ring(self):
        assert improved_entropy([1.0], 1) == 0.0

    def test_uniform_pair(self):
        # A = 1.5, g = 1.75, f = (1.5, 2)
        assert improved_entropy([0.5, 0.5], 2) == pytest.approx(3.0625, abs=1e-12)

    def test_all_mass_in_first_ring(self):
        assert improved_entropy([1.0, 0.0], 2) == 0.0

    def test_ring_count_must_match(self):
        with pytest.raises(InvalidInputError):
            improved_entropy([0.5, 0.5], 3)

    def test_position_matters(self):
        a = improved_entropy([0.25, 0.75])
        b = improved_entropy([0.75, 0.25])
        assert a == pytest.approx(2.573542966721748, abs=1e-12)
        assert b == pytest.approx(2.383740428369136, abs=1e-12)
        assert shannon_entropy([0.25, 0.75]) == shannon_entropy([0.75, 0.25])

    @given(probability_vectors)
    def test_bounds_and_oracle(self, p):
        e = improved_entropy(p)
        assert e >= 0
        if len(p) >= 2:
            assert e <= 4 * math.log2(len(p)) + 1e-12
        assert e == pytest.approx(weighted_entropy(p), abs=1e-12)


class TestExtractDescriptor:
    @pytest.mark.parametrize("kind", KINDS)
    def test_solid_image(self, kind):
        # a solid corpus gets one circle under the automatic rule
        n_circles = choose_circle_count([np.full((128, 128), 9)])
        rec = extract_descriptor(np.full((128, 128), 9), kind, n_circles=n_circles)
        expected = np.zeros(32)
        expected[9] = 1
        np.testing.assert_array_equal(rec.hist, expected)
        np.testing.assert_array_equal(rec.entropy, np.zeros(32))
        if kind is DescriptorKind.DCDEN:
            np.testing.assert_array_equal(rec.n_neighborhoods, expected.astype(int))
        else:
            assert not rec.n_neighborhoods.any()

    def test_solid_image_spreads_over_several_rings(self):
        rec = extract_descriptor(np.full((16, 16), 9), "cde", n_circles=4)
        assert rec.entropy[9] > 0

    def test_two_equal_neighborhoods(self):
        grid = np.zeros((4, 4), dtype=int)
        grid[0] = grid[3] = 5
        rec = extract_descriptor(grid, "dcden")
        assert rec.entropy[5] == 1.0
        assert rec.n_neighborhoods[5] == 2
        assert rec.entropy[0] == 0.0 and rec.n_neighborhoods[0] == 1

    def test_checkerboard(self):
        rec = extract_descriptor(np.array([[3, 7], [7, 3]]), DescriptorKind.DCDEN)
        assert (rec.hist[3], rec.hist[7]) == (0.5, 0.5)
        assert (rec.entropy[3], rec.entropy[7]) == (0.0, 1.0)
        assert (rec.n_neighborhoods[3], rec.n_neighborhoods[7]) == (1, 2)

    def test_annular_kinds_need_circles(self):
        for kind in ("cde", "icde"):
            with pytest.raises(InvalidInputError):
                extract_descriptor(np.zeros((4, 4), dtype=int), kind)
            with pytest.raises(InvalidInputError):
                extract_descriptor(np.zeros((4, 4), dtype=int), kind, n_circles=0)

    def test_unknown_kind(self):
        with pytest.raises(InvalidInputError):
            extract_descriptor(np.zeros((4, 4), dtype=int), "sift")

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 6))
    def test_entropies_match_oracles(self, seed, n_circles):
        grid = random_bin_map(seed, (12, 12))
        dcden = extract_descriptor(grid, "dcden")
        cde = extract_descriptor(grid, "cde", n_circles)
        icde = extract_descriptor(grid, "icde", n_circles)
        sizes = flood_fill_sizes(grid.tolist())
        for b, counter in sizes.items():
            comp = [s for s, k in counter.items() for _ in range(k)]
            total = sum(comp)
            assert dcden.entropy[b] == pytest.approx(entropy_bits([s / total for s in comp]), abs=1e-12)
            assert dcden.n_neighborhoods[b] == len(comp)
            pixels = [tuple(p) for p in np.argwhere(grid == b).tolist()]
            rings = [c / total for c in ring_counts_loop(pixels, n_circles)]
            assert cde.entropy[b] == pytest.approx(entropy_bits(rings), abs=1e-12)
            assert icde.entropy[b] == pytest.approx(weighted_entropy(rings), abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(KINDS))
    def test_record_invariants(self, seed, kind):
        grid = random_bin_map(seed, (20, 20), n_bins=32)
        rec = extract_descriptor(grid, kind, n_circles=3)
        assert abs(rec.hist.sum() - 1) <= 1e-9
        assert np.all(rec.hist >= 0) and np.all(rec.entropy >= 0)
        assert np.all(rec.entropy[rec.hist == 0] == 0)
        if kind is DescriptorKind.DCDEN:
            assert np.all((rec.n_neighborhoods >= 1) == (rec.hist > 0))
        if kind is DescriptorKind.HIST:
            assert not rec.entropy.any()

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_dcden_rotation_invariant(self, seed):
        grid = random_bin_map(seed)
        a = extract_descriptor(grid, "dcden")
        b = extract_descriptor(np.rot90(grid, 2), "dcden")
        assert a.same_values(b, atol=1e-12)


class TestRecord:
    def test_vector_round_trip(self):
        rec = extract_descriptor(random_bin_map(3), "dcden")
        back = DescriptorRecord.from_vector(rec.to_vector(), "dcden")
        assert back.same_values(rec)

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            DescriptorRecord("hist", np.ones(32) / 32, np.zeros(31), np.zeros(32))


class TestChooseCircleCount:
    def test_solid_image(self):
        assert choose_circle_count([np.full((128, 128), 4)]) == 1

    def test_mean_of_two_and_four(self):
        sizes = flood_fill_sizes(TWO_AND_FOUR.tolist())
        assert {b: sum(c.values()) for b, c in sizes.items()} == {1: 2, 2: 4}
        assert mean_neighborhood_count(TWO_AND_FOUR) == 3.0
        assert choose_circle_count([TWO_AND_FOUR]) == 3

    def test_rounding(self):
        assert circle_count_from_means([2.0, 4.2]) == 3
        assert circle_count_from_means([2.5]) == 3
        assert circle_count_from_means([2.4999]) == 2
        assert circle_count_from_means([0.2]) == 1

    def test_empty_bins_are_ignored(self):
        # 31 empty bins would otherwise drag the mean towards zero
        assert choose_circle_count([np.full((8, 8), 0), TWO_AND_FOUR]) == 2

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpusError):
            choose_circle_count([])
        with pytest.raises(InvalidInputError):
            choose_circle_count([])
