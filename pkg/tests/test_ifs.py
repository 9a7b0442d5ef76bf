import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cascadim import AffineIfs, Subshift, Word, gamma_estimate, overlap_count
from cascadim.errors import CapExceeded

EX_OVERLAP = AffineIfs.from_maps([(0.5, 0.0), (0.5, 0.0), (0.5, 0.5)])


class TestAffineIfs:
    def test_ratio_range_enforced(self):
        with pytest.raises(ValueError):
            AffineIfs.from_maps([(1.0, 0.0), (0.5, 0.5)])

    def test_tiling_hull(self, tiling2):
        assert tiling2.attractor_min == 0.0
        assert tiling2.attractor_max == 1.0
        assert tiling2.diameter == 1.0

    def test_mixed_ratio_hull_is_fixed_point_envelope(self):
        ifs = AffineIfs.from_maps([(0.1, 0.0), (0.9, -0.05)])
        assert ifs.attractor_min == pytest.approx(-0.5)
        assert ifs.attractor_max == pytest.approx(0.0)


class TestCanonicalPoint:
    def test_tiling_single_letter(self, tiling2):
        assert tiling2.canonical_point(Word.from_string("2", 2), tail=1) == 0.5

    def test_empty_word_gives_tail_fixed_point(self, tiling2):
        assert tiling2.canonical_point(Word((), 2), tail=2) == 1.0

    def test_composition_oracle(self):
        ifs = AffineIfs.from_maps([(0.4, -1.0), (0.4, 1.0)])
        fix1 = -1.0 / (1.0 - 0.4)
        expected = 0.4 * (0.4 * fix1 - 1.0) + 1.0
        assert ifs.canonical_point(Word.from_string("21", 2), tail=1) == pytest.approx(expected, abs=0)

    @given(st.lists(st.integers(1, 2), max_size=6), st.lists(st.integers(1, 2), max_size=6))
    @settings(max_examples=40, deadline=None)
    def test_composition_associativity(self, u, v):
        ifs = AffineIfs.from_maps([(0.4, -1.0), (0.55, 0.3)])
        left = ifs.canonical_point(tuple(u) + tuple(v), tail=1)
        right = ifs.apply_word(tuple(u), ifs.canonical_point(tuple(v), tail=1))
        assert left == right  # identical composition order, bitwise

    def test_tail_distance_bound(self, tiling2):
        u = Word.from_string("1212", 2)
        p1 = tiling2.canonical_point(u, tail=1)
        p2 = tiling2.canonical_point(u, tail=2)
        assert abs(p1 - p2) <= tiling2.diameter * tiling2.contraction_of_word(u)


class TestCylinderInterval:
    def test_tiling_first_letter(self, tiling2):
        assert tiling2.cylinder_interval(Word.from_string("1", 2)) == (0.0, 0.5)

    def test_exact_overlap_letters_coincide(self):
        i1 = EX_OVERLAP.cylinder_interval(Word.from_string("1", 3))
        i2 = EX_OVERLAP.cylinder_interval(Word.from_string("2", 3))
        assert i1 == i2 == (0.0, 0.5)

    def test_length_scales_by_ratio_power(self, tiling2):
        for n in (1, 3, 6):
            lo, hi = tiling2.cylinder_interval(tuple([1] * n))
            assert hi - lo == pytest.approx(0.5**n * tiling2.diameter, abs=1e-15)

    @given(st.lists(st.integers(1, 2), max_size=5), st.lists(st.integers(1, 2), min_size=1, max_size=5))
    @settings(max_examples=40, deadline=None)
    def test_nestedness(self, u, v):
        ifs = AffineIfs.from_maps([(0.5, 0.0), (0.3, 0.6)])
        lo_u, hi_u = ifs.cylinder_interval(tuple(u))
        lo_uv, hi_uv = ifs.cylinder_interval(tuple(u) + tuple(v))
        assert lo_u - 1e-12 <= lo_uv and hi_uv <= hi_u + 1e-12


def _overlap_oracle(x, ifs, n):
    """Independent O(N^2) overlap counter: test every event point directly."""
    delta = ifs.equal_ratio
    codes = x.admissible_codes(n)
    los, his = ifs.intervals_for_codes(codes, n)
    r = delta**n
    candidates = np.concatenate([los - r, his + r])
    best = 0
    for c in candidates:
        best = max(best, int(((los <= c + r) & (his >= c - r)).sum()))
    return best


class TestOverlapCount:
    def test_tiling_value_from_oracle(self, tiling2):
        full2 = Subshift.full(2)
        for n in (3, 6):
            oracle = _overlap_oracle(full2, tiling2, n)
            assert overlap_count(full2, tiling2, n) == oracle
        assert overlap_count(full2, tiling2, 6) == 4  # frozen from the oracle
        assert 3 <= overlap_count(full2, tiling2, 6) <= 4

    def test_single_letter_loop_is_one(self, tiling2):
        loop = Subshift.sft([[1, 0], [0, 0]])
        for n in (1, 4, 7):
            assert overlap_count(loop, tiling2, n) == 1

    def test_exact_overlap_digit_collisions(self):
        # letters 1,2 share a dyadic digit: the all-zeros cell has 2^n preimages
        assert overlap_count(Subshift.full(3), EX_OVERLAP, 10) >= 2**10

    def test_oracle_agreement_overlapping(self):
        full3 = Subshift.full(3)
        for n in (2, 4, 6):
            assert overlap_count(full3, EX_OVERLAP, n) == _overlap_oracle(full3, EX_OVERLAP, n)

    def test_translation_and_scaling_equivariance(self):
        full2 = Subshift.full(2)
        base = AffineIfs.from_maps([(0.5, 0.0), (0.5, 0.5)])
        n = 5
        expected = overlap_count(full2, base, n)
        for c, d in ((1.0, 0.7), (3.0, -1.2), (0.25, 0.0)):
            moved = AffineIfs.from_maps([(0.5, c * t + d) for t in base.translations])
            assert overlap_count(full2, moved, n, radius=c * 0.5**n) == expected

    def test_separated_system_bounded_by_four(self):
        full2 = Subshift.full(2)
        separated = AffineIfs.from_maps([(0.3, 0.0), (0.3, 0.7)])
        for n in (2, 5, 8):
            assert overlap_count(full2, separated, n) <= 4

    def test_mixed_ratio_rejected(self):
        mixed = AffineIfs.from_maps([(0.4, 0.0), (0.5, 0.5)])
        with pytest.raises(ValueError):
            overlap_count(Subshift.full(2), mixed, 3)

    def test_cap_propagates(self, tiling2):
        with pytest.raises(CapExceeded):
            overlap_count(Subshift.full(2), tiling2, 12, cap=100)


class TestGamma:
    def test_tiling_flat(self, tiling2):
        prof = gamma_estimate(Subshift.full(2), tiling2, 12)
        assert prof.gamma_estimate <= 0.05
        assert all(t <= 4 for t in prof.counts)

    def test_exact_overlap_is_one(self):
        prof = gamma_estimate(Subshift.full(3), EX_OVERLAP, 11)
        assert 0.95 <= prof.gamma_estimate <= 1.05

    def test_golden_mean_flat(self, golden_mean, tiling2):
        prof = gamma_estimate(golden_mean, tiling2, 12)
        assert prof.gamma_estimate <= 0.05

    def test_window_is_top_half(self, tiling2):
        prof = gamma_estimate(Subshift.full(2), tiling2, 9)
        assert prof.fit_window == (5, 9)
        assert len(prof.counts) == 9
