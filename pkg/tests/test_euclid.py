import math

import numpy as np
import pytest

from cascadim import (
    AffineIfs,
    AtomicMeasure,
    IntervalSet,
    KeyedRng,
    Subshift,
    SymbolicMeasure,
    WeightLaw,
    bernoulli_convolution,
    cascade_measure,
    convolve,
    marginal,
    percolation_codes,
    product,
    project,
    pushforward,
    set_image,
    sumset,
)
from cascadim.errors import CapExceeded, ScaleBelowResolution

EX_OVERLAP = AffineIfs.from_maps([(0.5, 0.0), (0.5, 0.0), (0.5, 0.5)])


def unit_cascade(measure, shift, depth, seed=1):
    return cascade_measure(measure, shift, WeightLaw.percolation(1.0), depth, KeyedRng(seed))


class TestAtomicMeasure:
    def test_sorted_and_merged(self):
        m = AtomicMeasure([0.5, 0.25, 0.5], [1.0, 2.0, 3.0], resolution=0.0)
        assert m.points.tolist() == [0.25, 0.5]
        assert m.weights.tolist() == [2.0, 4.0]

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            AtomicMeasure([0.0], [-1.0], resolution=0.0)

    def test_csv(self, tmp_path):
        m = AtomicMeasure([0.25, 0.5], [0.5, 0.5], resolution=0.0)
        m.to_csv(tmp_path / "m.csv")
        lines = (tmp_path / "m.csv").read_text().splitlines()
        assert lines[0] == "x,weight" and len(lines) == 3

    def test_interval_csv(self, tmp_path):
        s = IntervalSet([0.0, 2.0], [1.0, 3.0])
        s.to_csv(tmp_path / "s.csv")
        lines = (tmp_path / "s.csv").read_text().splitlines()
        assert lines[0] == "lo,hi" and lines[1] == "0,1" and len(lines) == 3

    def test_planar_atoms_sorted_by_x(self):
        m = AtomicMeasure([[0.9, 0.1], [0.1, 0.5], [0.5, 0.2]], [1.0, 2.0, 3.0], 0.0)
        assert m.points[:, 0].tolist() == [0.1, 0.5, 0.9]
        assert m.weights.tolist() == [2.0, 3.0, 1.0]


class TestPushforward:
    def test_depth_one_uniform(self, uniform2, tiling2):
        m = pushforward(unit_cascade(uniform2, Subshift.full(2), 1), tiling2)
        assert m.points.tolist() == [0.0, 0.5]
        assert m.weights.tolist() == [0.5, 0.5]
        assert m.resolution == pytest.approx(0.5)

    def test_total_weight_preserved(self, uniform2, tiling2):
        cm = cascade_measure(uniform2, Subshift.full(2), WeightLaw.percolation(0.7), 10, KeyedRng(8))
        m = pushforward(cm, tiling2)
        assert m.total_weight == pytest.approx(cm.total_mass, rel=1e-12)

    def test_exact_overlap_atoms_merge(self):
        base = SymbolicMeasure.uniform(3)
        cm = unit_cascade(base, Subshift.full(3), 4)
        m = pushforward(cm, EX_OVERLAP)
        # 3^4 words collapse onto the 2^4 dyadic points
        assert len(m) == 16
        assert m.total_weight == pytest.approx(1.0, abs=1e-12)
        # word "1w" and "2w" coincide: the leftmost atom collects 2^4 words
        assert m.weights[0] == pytest.approx((2 / 3) ** 4, abs=1e-12)


class TestSetImage:
    def test_full_depth_words_tile_unit_interval(self, tiling2):
        img = set_image(Subshift.full(2).admissible_words(6), tiling2)
        assert len(img) == 1
        assert (img.los[0], img.his[0]) == (0.0, 1.0)

    def test_empty(self, tiling2):
        assert len(set_image([], tiling2)) == 0

    def test_golden_mean_depth_four_oracle(self, golden_mean, tiling2):
        # oracle: merge the 8 dyadic intervals by hand
        words = golden_mean.admissible_words(4)
        intervals = sorted(tiling2.cylinder_interval(w) for w in words)
        merged = [list(intervals[0])]
        for lo, hi in intervals[1:]:
            if lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        img = set_image(words, tiling2)
        assert len(img) == len(merged)
        assert np.allclose(img.los, [m[0] for m in merged], atol=0)
        assert np.allclose(img.his, [m[1] for m in merged], atol=0)
        assert img.source_scale == pytest.approx(1 / 16)


class TestProduct:
    def test_single_atoms(self):
        m = product(AtomicMeasure([1.0], [0.5], 0.0), AtomicMeasure([2.0], [0.25], 0.0))
        assert m.points.tolist() == [[1.0, 2.0]]
        assert m.weights.tolist() == [0.125]

    def test_exact_total(self):
        m1 = AtomicMeasure([0.0, 1.0], [0.4, 0.6], 0.0)
        m2 = AtomicMeasure([0.0, 0.5, 1.0], [0.2, 0.3, 0.5], 0.0)
        m = product(m1, m2)
        assert m.total_weight == pytest.approx(m1.total_weight * m2.total_weight, abs=1e-9)

    def test_sampled_matches_exact_ball_masses(self, np_rng):
        xs = np.linspace(0, 1, 10)
        m1 = AtomicMeasure(xs, np_rng.random(10) + 0.1, 0.0)
        m2 = AtomicMeasure(xs, np_rng.random(10) + 0.1, 0.0)
        exact = product(m1, m2)
        sampled = product(m1, m2, atom_cap=50, rng=KeyedRng(3))  # force sampling
        n = len(sampled)
        assert n == 50
        w = m1.total_weight * m2.total_weight
        for center in ((0.5, 0.5), (0.2, 0.8)):
            me = exact.ball_mass(center, 0.3)
            ms = sampled.ball_mass(center, 0.3)
            p = me / w
            sigma = w * math.sqrt(p * (1 - p) / n)
            assert abs(ms - me) < 4 * sigma + 1e-12


class TestProjection:
    def test_zero_exponent_plus(self):
        prod = product(AtomicMeasure([0.0], [1.0], 0.0), AtomicMeasure([0.0], [1.0], 0.0))
        m = project(prod, 0.0, +1, 0.5)
        assert m.points.tolist() == [0.0]

    def test_weight_preserved_and_formula(self):
        prod = product(AtomicMeasure([2.0], [0.5], 0.0), AtomicMeasure([3.0], [0.4], 0.0))
        m = project(prod, 2.0, +1, 0.5)
        assert m.points[0] == pytest.approx(0.25 * 2.0 + 3.0)
        assert m.weights[0] == pytest.approx(0.2)
        mm = project(prod, 2.0, -1, 0.5)
        assert mm.points[0] == pytest.approx(0.25 * 2.0 - 3.0)

    def test_marginals_recover_factors(self):
        m1 = AtomicMeasure([0.0, 1.0], [0.4, 0.6], 0.0)
        m2 = AtomicMeasure([0.0, 2.0], [0.7, 0.3], 0.0)
        prod = product(m1, m2)
        mx = marginal(prod, 0)
        assert mx.points.tolist() == m1.points.tolist()
        assert np.allclose(mx.weights, m1.weights, atol=1e-15)
        my = marginal(prod, 1)
        assert np.allclose(my.weights, m2.weights, atol=1e-15)


class TestConvolve:
    def test_point_masses_add(self):
        m = convolve(AtomicMeasure([1.5], [1.0], 0.0), AtomicMeasure([-0.5], [1.0], 0.0))
        assert m.points.tolist() == [1.0]
        assert m.weights.tolist() == [1.0]

    def test_commutative_ball_masses(self, uniform2, tiling2):
        m1 = pushforward(unit_cascade(uniform2, Subshift.full(2), 6), tiling2)
        m2 = pushforward(unit_cascade(SymbolicMeasure.bernoulli([0.3, 0.7]), Subshift.full(2), 5), tiling2)
        c12 = convolve(m1, m2)
        c21 = convolve(m2, m1)
        for center in (0.3, 0.9, 1.5):
            assert c12.ball_mass(center, 0.1) == pytest.approx(c21.ball_mass(center, 0.1), rel=1e-12)

    def test_binomial_profile_oracle(self, uniform2, tiling2):
        # self-convolution of the depth-6 uniform tiling measure: the atom
        # weights on the grid follow the discrete self-convolution
        m = pushforward(unit_cascade(uniform2, Subshift.full(2), 6), tiling2)
        conv = convolve(m, m)
        oracle = np.convolve(np.full(64, 1 / 64), np.full(64, 1 / 64))
        assert len(conv) == 127
        assert np.allclose(np.sort(conv.weights)[::-1], np.sort(oracle)[::-1], atol=1e-15)
        assert conv.weights[0] == pytest.approx(1 / 4096, abs=1e-18)

    def test_equals_projected_product(self):
        m1 = AtomicMeasure([0.0, 0.25, 0.75], [0.2, 0.5, 0.3], 0.0)
        m2 = AtomicMeasure([0.1, 0.6], [0.5, 0.5], 0.0)
        conv = convolve(m1, m2)
        proj = project(product(m1, m2), 0.0, +1, 0.5)
        # normalization pair (scale, shift) = (1, 0): identical atom sets
        assert np.allclose(np.sort(conv.points), np.sort(proj.points), atol=0)
        for center in (0.3, 0.85):
            assert conv.ball_mass(center, 0.2) == pytest.approx(proj.ball_mass(center, 0.2), abs=1e-15)

    def test_general_exponent_reduces_to_scaled_convolution(self):
        # project(product, s, +) == convolve(scaled(m1, delta^s), m2), (1, 0) map
        m1 = AtomicMeasure([0.0, 0.25, 0.75], [0.2, 0.5, 0.3], 0.0)
        m2 = AtomicMeasure([0.1, 0.6], [0.5, 0.5], 0.0)
        delta, s = 0.5, 1.5
        proj = project(product(m1, m2), s, +1, delta)
        conv = convolve(m1.scaled(delta**s), m2)
        assert np.allclose(np.sort(proj.points), np.sort(conv.points), atol=1e-15)
        for center in (0.3, 0.7):
            assert proj.ball_mass(center, 0.2) == pytest.approx(conv.ball_mass(center, 0.2), abs=1e-15)


class TestSumset:
    def test_unit_plus_unit(self):
        u = IntervalSet([0.0], [1.0])
        out = sumset(u, u, 1.0)
        assert len(out) == 1 and (out.los[0], out.his[0]) == (0.0, 2.0)

    def test_singleton_second_set(self):
        pts = IntervalSet([0.0, 1.0], [0.0, 1.0])
        single = IntervalSet([0.0], [0.0])
        out = sumset(pts, single, 2.5)
        assert out.los.tolist() == [0.0, 1.0]
        assert out.his.tolist() == [0.0, 1.0]

    def test_zero_s_rejected(self):
        u = IntervalSet([0.0], [1.0])
        with pytest.raises(ValueError):
            sumset(u, u, 0.0)

    def test_pair_cap(self):
        a = IntervalSet(np.arange(100.0) * 2, np.arange(100.0) * 2 + 0.5)
        with pytest.raises(CapExceeded):
            sumset(a, a, 1.0, pair_cap=100)

    def test_exhaustive_oracle_golden_triadic(self, golden_mean, tiling2):
        # incommensurable pairing: depth-6 golden-mean image + sqrt(2) * depth-4 triadic image
        img1 = set_image(golden_mean.admissible_words(6), tiling2)
        c2 = percolation_codes(Subshift.full(3), 0.7, 4, KeyedRng(5))
        img2 = set_image(c2, AffineIfs.tiling(3), length=4)
        s = math.sqrt(2.0)
        out = sumset(img1, img2, s)
        # oracle: python double loop + merge
        pairs = sorted(
            (lo1 + s * lo2, hi1 + s * hi2)
            for lo1, hi1 in zip(img1.los, img1.his)
            for lo2, hi2 in zip(img2.los, img2.his)
        )
        merged = [list(pairs[0])]
        for lo, hi in pairs[1:]:
            if lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        assert len(out) == len(merged)
        assert np.allclose(out.los, [m[0] for m in merged], atol=1e-15)
        assert np.allclose(out.his, [m[1] for m in merged], atol=1e-15)

    def test_erosion_path_equals_brute(self):
        import cascadim.euclid as E

        rng = np.random.default_rng(12)
        for _ in range(8):
            lo1 = np.sort(rng.random(120)) * 2
            a = IntervalSet(lo1, lo1 + rng.random(120) * 0.01)
            lo2 = np.sort(rng.random(90)) * 1.5 + 3
            b = IntervalSet(lo2, lo2 + rng.random(90) * 0.02)
            for s in (0.8, -1.3):
                bs = b.scale(s)
                brute = E._brute_sumset(a.los, a.his, bs.los, bs.his, 0.0)
                eroded = E._erosion_sumset(a.los, a.his, bs.los, bs.his, 0.0)
                assert len(brute) == len(eroded)
                assert np.allclose(brute.los, eroded.los, atol=1e-13)
                assert np.allclose(brute.his, eroded.his, atol=1e-13)

    def test_reflection_identity(self):
        # {x + s y} = s * {y + (1/s) x}
        rng = np.random.default_rng(5)
        lo1 = np.sort(rng.random(40))
        s1 = IntervalSet(lo1, lo1 + 0.01)
        lo2 = np.sort(rng.random(30)) * 2
        s2 = IntervalSet(lo2, lo2 + 0.02)
        for s in (2.0, -0.7):
            left = sumset(s1, s2, s)
            right = sumset(s2, s1, 1.0 / s).scale(s)
            assert len(left) == len(right)
            assert np.allclose(left.los, right.los, atol=1e-12)
            assert np.allclose(left.his, right.his, atol=1e-12)


class TestBernoulliConvolution:
    def test_half_is_uniform_dyadic(self):
        m = bernoulli_convolution(0.5, 0.5, 6)
        assert len(m) == 64
        assert np.allclose(m.weights, 1 / 64, atol=0)
        gaps = np.diff(m.points)
        assert np.allclose(gaps, gaps[0], atol=1e-12)

    def test_total_weight_unit_law(self):
        m = bernoulli_convolution(0.4, 0.7, 8)
        assert m.total_weight == pytest.approx(1.0, abs=1e-12)

    def test_third_cantor_cylinder_masses(self):
        # beta = 1/3: affine image of the middle-thirds Cantor set; the ball
        # around a depth-k cylinder point with the cylinder's radius carries
        # exactly the cylinder mass 2^-k
        depth = 8
        m = bernoulli_convolution(1 / 3, 0.5, depth)
        ifs = AffineIfs.bernoulli_pair(1 / 3)
        for word in ((1, 2, 1), (2, 2, 2), (1, 1, 2)):
            k = len(word)
            lo, hi = ifs.cylinder_interval(word)
            center = (lo + hi) / 2
            r = (hi - lo) / 2
            assert m.ball_mass(center, r) == pytest.approx(0.5**k, abs=1e-12)


class TestBallMass:
    def test_whole_support(self, uniform2, tiling2):
        m = pushforward(unit_cascade(uniform2, Subshift.full(2), 8), tiling2)
        lo, hi = m.support_bounds()
        assert m.ball_mass((lo + hi) / 2, hi - lo) == pytest.approx(m.total_weight, abs=1e-12)

    def test_single_atom_small_ball(self):
        m = AtomicMeasure([0.0, 1.0], [0.25, 0.75], resolution=1e-6)
        assert m.ball_mass(1.0, 1e-5) == pytest.approx(0.75)

    def test_uniform_interval_mass(self, uniform2, tiling2):
        m = pushforward(unit_cascade(uniform2, Subshift.full(2), 10), tiling2)
        got = m.ball_mass(0.5, 2.0**-4)
        assert abs(got - 2 * 2.0**-4) <= 1 / 1024 + 1e-12

    def test_scale_floor_enforced(self):
        m = AtomicMeasure([0.0], [1.0], resolution=1e-3)
        with pytest.raises(ScaleBelowResolution):
            m.ball_mass(0.0, 1e-4)

    def test_monotone_in_radius(self, uniform2, tiling2):
        m = pushforward(unit_cascade(uniform2, Subshift.full(2), 8), tiling2)
        masses = [m.ball_mass(0.37, r) for r in (0.01, 0.05, 0.1, 0.4)]
        assert all(a <= b + 1e-15 for a, b in zip(masses, masses[1:]))
