"""Euclidean discretizations of symbolic measures and sets.

Atomic measures (weighted point clouds in dimension 1 or 2) carry an explicit
resolution: the spatial uncertainty of replacing each cylinder by one
representative point.  Estimators must stay above it.  Interval sets hold
merged unions of closed intervals for set-level work (percolation images,
sumsets).

The atom representative of a cylinder is the coding-map image of the word
continued by the constant tail 1; any other continuation moves the point by
at most the resolution.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .cascade import CylinderMeasure, KeyedRng, WeightLaw, cascade_measure
from .errors import CapExceeded, ScaleBelowResolution
from .ifs import AffineIfs
from .symbolic import Subshift, SymbolicMeasure, Word, letters_to_codes

__all__ = [
    "AtomicMeasure",
    "IntervalSet",
    "pushforward",
    "set_image",
    "product",
    "project",
    "marginal",
    "convolve",
    "sumset",
    "bernoulli_convolution",
    "ball_mass",
]

_BRUTE_PAIR_LIMIT = 1 << 22


class AtomicMeasure:
    """Weighted atoms in dimension 1 or 2.

    1-d atoms are kept sorted by coordinate with exact duplicates merged;
    2-d atoms keep insertion order.  ``resolution`` bounds the positional
    uncertainty of every atom.
    """

    def __init__(self, points, weights, resolution: float, _sorted: bool = False):
        points = np.asarray(points, dtype=np.float64)
        weights = np.asarray(weights, dtype=np.float64)
        if points.ndim not in (1, 2) or (points.ndim == 2 and points.shape[1] != 2):
            raise ValueError("points must be (N,) or (N,2)")
        if weights.shape != (points.shape[0],):
            raise ValueError("weights must align with points")
        if (weights < 0).any():
            raise ValueError("weights must be nonnegative")
        if not _sorted:
            if points.ndim == 1:
                order = np.argsort(points, kind="stable")
                points = points[order]
                weights = weights[order]
                if points.size > 1:
                    starts = np.flatnonzero(
                        np.concatenate([[True], points[1:] != points[:-1]])
                    )
                    if starts.size != points.size:  # merge exactly coinciding atoms
                        weights = np.add.reduceat(weights, starts)
                        points = points[starts]
            elif points.shape[0] > 1:
                # x-sorted so planar ball queries can window on the first axis
                order = np.lexsort((points[:, 1], points[:, 0]))
                points = points[order]
                weights = weights[order]
        self.points = points
        self.weights = weights
        self.resolution = float(resolution)
        self._cum = None

    @property
    def dim(self) -> int:
        return 1 if self.points.ndim == 1 else 2

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def __len__(self) -> int:
        return len(self.weights)

    def support_bounds(self):
        if len(self) == 0:
            raise ValueError("empty measure has no support")
        if self.dim == 1:
            return float(self.points[0]), float(self.points[-1])
        return self.points.min(axis=0), self.points.max(axis=0)

    def normalized(self) -> "AtomicMeasure":
        tot = self.total_weight
        if tot <= 0:
            raise ValueError("cannot normalize a zero measure")
        if abs(tot - 1.0) < 1e-15:
            return self
        out = AtomicMeasure.__new__(AtomicMeasure)
        out.points = self.points
        out.weights = self.weights / tot
        out.resolution = self.resolution
        out._cum = None
        return out

    # -- ball queries -------------------------------------------------------

    def _cumweights(self) -> np.ndarray:
        if self._cum is None:
            self._cum = np.concatenate([[0.0], np.cumsum(self.weights)])
        return self._cum

    def ball_mass(self, center, r: float) -> float:
        """Total weight within the closed ball; r must respect the resolution."""
        if r < self.resolution:
            raise ScaleBelowResolution(r, self.resolution)
        if self.dim == 1:
            return float(self.ball_mass_many(np.array([center]), r)[0])
        cx, cy = float(center[0]), float(center[1])
        lo = np.searchsorted(self.points[:, 0], cx - r, side="left")
        hi = np.searchsorted(self.points[:, 0], cx + r, side="right")
        diff = self.points[lo:hi] - np.array([cx, cy])
        inside = (diff[:, 0] ** 2 + diff[:, 1] ** 2) <= r * r
        return float(self.weights[lo:hi][inside].sum())

    def ball_mass_many(self, centers, r: float) -> np.ndarray:
        if r < self.resolution:
            raise ScaleBelowResolution(r, self.resolution)
        centers = np.asarray(centers, dtype=float)
        if self.dim == 1:
            cum = self._cumweights()
            lo = np.searchsorted(self.points, centers - r, side="left")
            hi = np.searchsorted(self.points, centers + r, side="right")
            return cum[hi] - cum[lo]
        out = np.empty(centers.shape[0])
        for i, c in enumerate(centers):
            out[i] = self.ball_mass(c, r)
        return out

    def scaled(self, c: float) -> "AtomicMeasure":
        """The pushforward under x -> c*x (1-d only)."""
        if self.dim != 1:
            raise ValueError("scaled is defined for 1-d measures")
        if c == 0:
            raise ValueError("scale factor must be nonzero")
        return AtomicMeasure(self.points * c, self.weights.copy(), self.resolution * abs(c))

    def sample_points(self, count: int, rng) -> np.ndarray:
        """Draw atom positions with probability proportional to weight."""
        tot = self.total_weight
        if tot <= 0:
            raise ValueError("cannot sample from a zero measure")
        if isinstance(rng, KeyedRng):
            u = rng.counter_uniforms(0xE17, count)
        else:
            u = rng.random(count)
        cum = np.cumsum(self.weights) / tot
        idx = np.minimum(np.searchsorted(cum, u, side="right"), len(self.weights) - 1)
        return self.points[idx]

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            if self.dim == 1:
                fh.write("x,weight\n")
                for x, w in zip(self.points, self.weights):
                    fh.write(f"{x:.17g},{w:.17g}\n")
            else:
                fh.write("x,y,weight\n")
                for (x, y), w in zip(self.points, self.weights):
                    fh.write(f"{x:.17g},{y:.17g},{w:.17g}\n")


class IntervalSet:
    """A merged union of closed intervals, kept sorted and disjoint."""

    def __init__(self, los, his, source_scale: float = 0.0, _merged: bool = False):
        los = np.asarray(los, dtype=np.float64)
        his = np.asarray(his, dtype=np.float64)
        if los.shape != his.shape or los.ndim != 1:
            raise ValueError("need matching 1-d endpoint arrays")
        if (his < los).any():
            raise ValueError("intervals must satisfy lo <= hi")
        if not _merged and los.size > 1:
            order = np.argsort(los, kind="stable")
            los = los[order]
            his = his[order]
            cummax = np.maximum.accumulate(his)
            starts = np.flatnonzero(np.concatenate([[True], los[1:] > cummax[:-1]]))
            ends = np.concatenate([starts[1:], [los.size]]) - 1
            los = los[starts]
            his = cummax[ends]
        self.los = los
        self.his = his
        self.source_scale = float(source_scale)

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(np.empty(0), np.empty(0))

    def __len__(self) -> int:
        return len(self.los)

    @property
    def measure(self) -> float:
        return float((self.his - self.los).sum())

    def hull(self) -> tuple[float, float]:
        if len(self) == 0:
            raise ValueError("empty set has no hull")
        return float(self.los[0]), float(self.his[-1])

    def translate(self, d: float) -> "IntervalSet":
        return IntervalSet(self.los + d, self.his + d, self.source_scale, _merged=True)

    def scale(self, c: float) -> "IntervalSet":
        if c == 0:
            raise ValueError("scale factor must be nonzero")
        los, his = self.los * c, self.his * c
        if c < 0:
            los, his = his[::-1], los[::-1]
        return IntervalSet(los, his, self.source_scale * abs(c), _merged=True)

    def complement_within(self, lo: float, hi: float) -> "IntervalSet":
        """Closure of [lo,hi] minus the set."""
        if len(self) == 0:
            return IntervalSet(np.array([lo]), np.array([hi]), self.source_scale, _merged=True)
        los = np.concatenate([[lo], self.his])
        his = np.concatenate([self.los, [hi]])
        keep = his > los
        return IntervalSet(los[keep], his[keep], self.source_scale, _merged=True)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("lo,hi\n")
            for lo, hi in zip(self.los, self.his):
                fh.write(f"{lo:.17g},{hi:.17g}\n")


# ---------------------------------------------------------------------------
# pushforwards and images


def _codes_and_length(words, alphabet_size: int | None = None):
    if isinstance(words, np.ndarray):
        raise TypeError("pass (codes, length, alphabet_size) via keyword helpers")
    words = list(words)
    if not words:
        return np.empty(0, dtype=np.int64), 0, alphabet_size
    n = len(words[0])
    a = words[0].alphabet_size
    if any(len(w) != n or w.alphabet_size != a for w in words):
        raise ValueError("words must share length and alphabet")
    letters = np.array([w.letters for w in words], dtype=np.int64)
    return letters_to_codes(letters, a), n, a


def pushforward(cm: CylinderMeasure, ifs: AffineIfs, tail: int = 1) -> AtomicMeasure:
    """Image of a cylinder measure under the coding map, one atom per word.

    Exactly coinciding atoms (exactly overlapping maps) merge their weights.
    """
    if cm.alphabet_size != ifs.alphabet_size:
        raise ValueError("alphabet mismatch")
    keep = cm.masses > 0
    codes = cm.codes[keep]
    masses = cm.masses[keep]
    pts = ifs.points_for_codes(codes, cm.depth, ifs.fixed_point(tail))
    if codes.size:
        res = ifs.diameter * float(ifs.contractions_for_codes(codes, cm.depth).max())
    else:
        res = 0.0
    return AtomicMeasure(pts, masses, res)


def set_image(words, ifs: AffineIfs, length: int | None = None) -> IntervalSet:
    """Union of the cylinder image intervals of equal-length words, merged."""
    if isinstance(words, np.ndarray):
        codes = np.asarray(words, dtype=np.int64)
        if length is None:
            raise ValueError("length required with a code array")
        n = length
    else:
        codes, n, _ = _codes_and_length(words)
    if codes.size == 0:
        return IntervalSet.empty()
    los, his = ifs.intervals_for_codes(codes, n)
    scale = float((his - los).max()) if codes.size else 0.0
    return IntervalSet(los, his, source_scale=scale)


# ---------------------------------------------------------------------------
# products, projections, convolutions


def product(
    m1: AtomicMeasure,
    m2: AtomicMeasure,
    atom_cap: int = 5_000_000,
    rng: KeyedRng | None = None,
) -> AtomicMeasure:
    """Product measure on the plane: exact grid if it fits, else sampled.

    The sampled mode draws index pairs coordinate-wise proportionally to the
    weights (an exact sampler for the product law) and gives every sampled
    atom the weight total/atom_cap.
    """
    if m1.dim != 1 or m2.dim != 1:
        raise ValueError("product needs two 1-d measures")
    res = max(m1.resolution, m2.resolution)
    n1, n2 = len(m1), len(m2)
    if n1 * n2 <= atom_cap:
        xs = np.repeat(m1.points, n2)
        ys = np.tile(m2.points, n1)
        ws = (m1.weights[:, None] * m2.weights[None, :]).ravel()
        return AtomicMeasure(np.column_stack([xs, ys]), ws, res)
    rng = rng or KeyedRng(0)
    u1 = rng.counter_uniforms(0xA1, atom_cap)
    u2 = rng.counter_uniforms(0xA2, atom_cap)
    c1 = np.cumsum(m1.weights) / m1.total_weight
    c2 = np.cumsum(m2.weights) / m2.total_weight
    i = np.minimum(np.searchsorted(c1, u1, side="right"), n1 - 1)
    j = np.minimum(np.searchsorted(c2, u2, side="right"), n2 - 1)
    w = m1.total_weight * m2.total_weight / atom_cap
    pts = np.column_stack([m1.points[i], m2.points[j]])
    return AtomicMeasure(pts, np.full(atom_cap, w), res)


def project(m: AtomicMeasure, s: float, sign: int, delta: float) -> AtomicMeasure:
    """Linear projection (x,y) -> delta^s * x +/- y of a planar measure."""
    if m.dim != 2:
        raise ValueError("project needs a 2-d measure")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    c = delta**s
    coords = c * m.points[:, 0] + sign * m.points[:, 1]
    return AtomicMeasure(coords, m.weights.copy(), m.resolution * (c + 1.0))


def marginal(m: AtomicMeasure, axis: int) -> AtomicMeasure:
    """Coordinate projection of a planar measure onto axis 0 (x) or 1 (y)."""
    if m.dim != 2:
        raise ValueError("marginal needs a 2-d measure")
    if axis not in (0, 1):
        raise ValueError("axis must be 0 or 1")
    return AtomicMeasure(m.points[:, axis], m.weights.copy(), m.resolution)


def convolve(
    m1: AtomicMeasure,
    m2: AtomicMeasure,
    atom_cap: int = 5_000_000,
    rng: KeyedRng | None = None,
) -> AtomicMeasure:
    """The additive convolution: atoms at x + y.

    Identical to projecting the product with unit coefficient; the projection
    family is already the affinely normalized form, so the normalization pair
    relating the two is (scale, shift) = (1, 0).  Cap semantics as product().
    """
    prod = product(m1, m2, atom_cap=atom_cap, rng=rng)
    coords = prod.points[:, 0] + prod.points[:, 1]
    return AtomicMeasure(coords, prod.weights, m1.resolution + m2.resolution)


# ---------------------------------------------------------------------------
# sumsets


def _brute_sumset(a_lo, a_hi, b_lo, b_hi, source: float) -> IntervalSet:
    """Chunked exact pairwise Minkowski sums, merged as they accumulate."""
    n, m = a_lo.size, b_lo.size
    chunk = max(1, _BRUTE_PAIR_LIMIT // max(m, 1))
    acc: IntervalSet | None = None
    for start in range(0, n, chunk):
        al = a_lo[start : start + chunk]
        ah = a_hi[start : start + chunk]
        los = (al[:, None] + b_lo[None, :]).ravel()
        his = (ah[:, None] + b_hi[None, :]).ravel()
        piece = IntervalSet(los, his, source)
        if acc is None:
            acc = piece
        else:
            acc = IntervalSet(
                np.concatenate([acc.los, piece.los]),
                np.concatenate([acc.his, piece.his]),
                source,
            )
    return acc if acc is not None else IntervalSet.empty()


def _merge_pieces(lo: np.ndarray, hi: np.ndarray):
    """Sort interval pieces and merge overlapping or touching ones."""
    if lo.size <= 1:
        return lo, hi
    order = np.argsort(lo, kind="stable")
    lo = lo[order]
    hi = hi[order]
    cummax = np.maximum.accumulate(hi)
    starts = np.flatnonzero(np.concatenate([[True], lo[1:] > cummax[:-1]]))
    ends = np.concatenate([starts[1:], [lo.size]]) - 1
    return lo[starts], cummax[ends]


def _intersect_sorted(c_lo, c_hi, d_lo, d_hi):
    """Intersection of a sorted disjoint family C with a sorted family D.

    D intervals may overlap each other; the result is re-merged.  Degenerate
    single-point intersections are dropped: with positive-length summands the
    uncovered set these calls build is open, so it has no isolated points.
    """
    if c_lo.size == 0 or d_lo.size == 0:
        return np.empty(0), np.empty(0)
    first = np.searchsorted(d_hi, c_lo, side="left")
    last = np.searchsorted(d_lo, c_hi, side="right")
    counts = last - first
    keep = counts > 0
    if not keep.any():
        return np.empty(0), np.empty(0)
    c_lo, c_hi, first, counts = c_lo[keep], c_hi[keep], first[keep], counts[keep]
    total = int(counts.sum())
    rep = np.repeat(np.arange(c_lo.size), counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    didx = first[rep] + offs
    lo = np.maximum(c_lo[rep], d_lo[didx])
    hi = np.minimum(c_hi[rep], d_hi[didx])
    pos = hi > lo
    return _merge_pieces(lo[pos], hi[pos])


def _erosion_sumset(a_lo, a_hi, b_lo, b_hi, source: float) -> IntervalSet:
    """Exact sumset via its complement.

    x misses A+B exactly when, for every summand interval J of B, the
    translate x - J fits inside a single gap of A.  Intersecting those
    per-interval admissible sets over all of B yields the complement; the
    candidate set shrinks geometrically, so dense instances resolve fast.
    """
    hull_lo = a_lo[0] + b_lo[0]
    hull_hi = a_hi[-1] + b_hi[-1]
    b_len = b_hi - b_lo
    # boundary rays stand in for the unbounded gaps of A^c; the translates
    # x - B_j they must absorb range over [hull_lo - max(B), hull_hi - min(B)]
    ray_lo = min(hull_lo - b_hi[-1], a_lo[0]) - 1.0
    ray_hi = max(hull_hi - b_lo[0], a_hi[-1]) + 1.0
    gap_lo = np.concatenate([[ray_lo], a_hi])
    gap_hi = np.concatenate([a_lo, [ray_hi]])
    order = np.argsort(-b_len, kind="stable")  # long summands shrink fastest
    c_lo = c_hi = None
    for j in order:
        d_lo = gap_lo + b_hi[j]
        d_hi = gap_hi + b_lo[j]
        if c_lo is None:
            pos = d_hi > d_lo
            c_lo, c_hi = _merge_pieces(d_lo[pos], d_hi[pos])
        else:
            c_lo, c_hi = _intersect_sorted(c_lo, c_hi, d_lo, d_hi)
        if c_lo.size == 0:
            return IntervalSet(np.array([hull_lo]), np.array([hull_hi]), source, _merged=True)
    uncovered = IntervalSet(c_lo, c_hi, source, _merged=True)
    return uncovered.complement_within(hull_lo, hull_hi)


def sumset(
    s1: IntervalSet,
    s2: IntervalSet,
    s: float,
    pair_cap: int = 5_000_000,
) -> IntervalSet:
    """The arithmetic sum {x + s*y} of two interval sets, exactly merged."""
    if s == 0:
        raise ValueError("s must be nonzero")
    if len(s1) == 0 or len(s2) == 0:
        return IntervalSet.empty()
    pairs = len(s1) * len(s2)
    if pairs > pair_cap:
        raise CapExceeded(pairs, pair_cap, what="interval pairs")
    sb = s2.scale(s)
    source = s1.source_scale + sb.source_scale
    if pairs <= _BRUTE_PAIR_LIMIT:
        return _brute_sumset(s1.los, s1.his, sb.los, sb.his, source)
    return _erosion_sumset(s1.los, s1.his, sb.los, sb.his, source)


# ---------------------------------------------------------------------------
# named constructions


def bernoulli_convolution(
    beta: float,
    p: float,
    depth: int,
    law: WeightLaw | None = None,
    rng: KeyedRng | None = None,
) -> AtomicMeasure:
    """Pushforward of the (optionally cascaded) p-Bernoulli measure under
    the two maps beta*x - 1, beta*x + 1."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must be in (0,1)")
    ifs = AffineIfs.bernoulli_pair(beta)
    base = SymbolicMeasure.bernoulli([p, 1.0 - p])
    law = law or WeightLaw.percolation(1.0)
    rng = rng or KeyedRng(0)
    cm = cascade_measure(base, Subshift.full(2), law, depth, rng)
    return pushforward(cm, ifs)


def ball_mass(m: AtomicMeasure, center, r: float) -> float:
    """Mass of the closed ball B(center, r); errors below the resolution."""
    return m.ball_mass(center, r)
