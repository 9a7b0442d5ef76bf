"""Affine iterated function systems on the line.

Canonical coding maps, cylinder image intervals, and the overlap counter:
the maximal number of depth-n cylinder images meeting a ball of radius
``delta**n``, whose growth exponent separates the regimes where percolation
image dimensions are exactly additive from those where overlaps inflate the
naive covering bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dimension import fit_loglog
from .errors import CapExceeded
from .symbolic import DEFAULT_WORD_CAP, Subshift, Word, codes_to_letters

__all__ = ["AffineIfs", "OverlapProfile", "overlap_count", "gamma_estimate"]


@dataclass(frozen=True)
class AffineIfs:
    """Maps ``x -> ratio_i * x + translation_i`` with ratios in (0,1)."""

    ratios: tuple[float, ...]
    translations: tuple[float, ...]

    def __post_init__(self):
        if len(self.ratios) != len(self.translations) or len(self.ratios) < 1:
            raise ValueError("need matching nonempty ratios/translations")
        if any(not 0.0 < r < 1.0 for r in self.ratios):
            raise ValueError("ratios must lie strictly in (0,1)")

    @classmethod
    def from_maps(cls, maps: Sequence[tuple[float, float]]) -> "AffineIfs":
        return cls(tuple(float(r) for r, _ in maps), tuple(float(t) for _, t in maps))

    @classmethod
    def tiling(cls, a: int) -> "AffineIfs":
        """The a-adic tiling of [0,1]: maps x/a + (i-1)/a."""
        return cls(tuple(1.0 / a for _ in range(a)), tuple((i - 1) / a for i in range(1, a + 1)))

    @classmethod
    def bernoulli_pair(cls, beta: float) -> "AffineIfs":
        """The two maps beta*x - 1, beta*x + 1 behind Bernoulli convolutions."""
        return cls((beta, beta), (-1.0, 1.0))

    @property
    def alphabet_size(self) -> int:
        return len(self.ratios)

    @property
    def equal_ratio(self) -> float | None:
        r0 = self.ratios[0]
        return r0 if all(r == r0 for r in self.ratios) else None

    def fixed_point(self, letter: int) -> float:
        return self.translations[letter - 1] / (1.0 - self.ratios[letter - 1])

    @property
    def attractor_min(self) -> float:
        # increasing maps: the attractor extremes are the extreme fixed points
        return min(self.fixed_point(i) for i in range(1, self.alphabet_size + 1))

    @property
    def attractor_max(self) -> float:
        return max(self.fixed_point(i) for i in range(1, self.alphabet_size + 1))

    @property
    def diameter(self) -> float:
        return self.attractor_max - self.attractor_min

    # -- coding map ----------------------------------------------------------

    def apply_word(self, u: Word | Sequence[int], x: float) -> float:
        letters = u.letters if isinstance(u, Word) else tuple(u)
        for l in reversed(letters):
            x = self.ratios[l - 1] * x + self.translations[l - 1]
        return x

    def canonical_point(self, u: Word | Sequence[int], tail: int = 1) -> float:
        """Image of the sequence u . tail^infinity under the coding map.

        Exact: the composed map applied to the fixed point of the tail letter.
        Any other continuation of u lands within diameter * prod(ratios of u).
        """
        return self.apply_word(u, self.fixed_point(tail))

    def cylinder_interval(self, u: Word | Sequence[int]) -> tuple[float, float]:
        """The image of the cylinder [u]: f_u applied to the attractor hull."""
        return (
            self.apply_word(u, self.attractor_min),
            self.apply_word(u, self.attractor_max),
        )

    def contraction_of_word(self, u: Word | Sequence[int]) -> float:
        letters = u.letters if isinstance(u, Word) else tuple(u)
        out = 1.0
        for l in letters:
            out *= self.ratios[l - 1]
        return out

    # -- vectorized variants over code arrays ---------------------------------

    def points_for_codes(self, codes: np.ndarray, length: int, x0: float) -> np.ndarray:
        """f_u(x0) for every base-a code u of the given length."""
        letters = codes_to_letters(codes, length, self.alphabet_size)
        return self.points_for_letters(letters, x0)

    def points_for_letters(self, letters: np.ndarray, x0: float) -> np.ndarray:
        r = np.array(self.ratios)
        t = np.array(self.translations)
        x = np.full(letters.shape[0], float(x0))
        for j in range(letters.shape[1] - 1, -1, -1):
            idx = letters[:, j] - 1
            x = r[idx] * x + t[idx]
        return x

    def intervals_for_codes(self, codes: np.ndarray, length: int) -> tuple[np.ndarray, np.ndarray]:
        los = self.points_for_codes(codes, length, self.attractor_min)
        his = self.points_for_codes(codes, length, self.attractor_max)
        return los, his

    def contractions_for_codes(self, codes: np.ndarray, length: int) -> np.ndarray:
        if self.equal_ratio is not None:
            return np.full(len(codes), self.equal_ratio**length)
        letters = codes_to_letters(codes, length, self.alphabet_size)
        r = np.array(self.ratios)
        out = np.ones(letters.shape[0])
        for j in range(letters.shape[1]):
            out *= r[letters[:, j] - 1]
        return out


@dataclass(frozen=True)
class OverlapProfile:
    """Overlap counts t_n for n = 1..n_max and the fitted growth exponent."""

    counts: tuple[int, ...]
    gamma_estimate: float
    fit_window: tuple[int, int]
    delta: float

    def as_dict(self) -> dict:
        return {
            "counts": list(self.counts),
            "gamma_estimate": self.gamma_estimate,
            "fit_window": list(self.fit_window),
            "delta": self.delta,
        }


def overlap_count(
    x: Subshift,
    ifs: AffineIfs,
    n: int,
    cap: int = DEFAULT_WORD_CAP,
    radius: float | None = None,
) -> int:
    """Exact sup over centers of depth-n cylinder images meeting B(center, delta^n).

    The count, as a function of the center, only changes where the closed ball
    starts or stops touching some interval, so sweeping the 2|X_n| event
    points (with multiplicities aggregated for exactly-coinciding intervals)
    attains the true supremum.  ``radius`` overrides the default ball radius
    delta^n, e.g. to check affine equivariance under rescaled translations.
    """
    delta = ifs.equal_ratio
    if delta is None:
        raise ValueError("overlap counting is defined for equal-ratio systems only")
    if x.alphabet_size != ifs.alphabet_size:
        raise ValueError("alphabet mismatch between subshift and IFS")
    if n < 1:
        raise ValueError("n must be >= 1")
    codes = x.admissible_codes(n, cap)
    los, _ = ifs.intervals_for_codes(codes, n)
    length = delta**n * ifs.diameter
    radius = delta**n if radius is None else float(radius)
    uniq, mult = np.unique(los, return_counts=True)
    starts = uniq - radius
    ends = uniq + length + radius
    coords = np.concatenate([starts, ends])
    deltas = np.concatenate([mult, -mult])
    kinds = np.concatenate([np.zeros(uniq.size, dtype=np.int8), np.ones(uniq.size, dtype=np.int8)])
    order = np.lexsort((kinds, coords))  # starts before ends at equal coords: closed/closed touch counts
    running = np.cumsum(deltas[order])
    return int(running.max())


def gamma_estimate(
    x: Subshift,
    ifs: AffineIfs,
    n_max: int,
    cap: int = DEFAULT_WORD_CAP,
) -> OverlapProfile:
    """Fit the growth exponent of the overlap counts over n in [ceil(n_max/2), n_max]."""
    if n_max < 4:
        raise ValueError("n_max must be >= 4")
    delta = ifs.equal_ratio
    if delta is None:
        raise ValueError("overlap counting is defined for equal-ratio systems only")
    counts = [overlap_count(x, ifs, n, cap) for n in range(1, n_max + 1)]
    n_lo = math.ceil(n_max / 2)
    ns = np.arange(n_lo, n_max + 1, dtype=float)
    xs = ns * math.log(1.0 / delta)
    ys = np.log([counts[int(n) - 1] for n in ns])
    if np.ptp(ys) == 0.0:
        slope = 0.0  # constant counts: flat profile, exponent zero
    else:
        slope, _, _ = fit_loglog(xs, ys)
    return OverlapProfile(tuple(counts), max(float(slope), 0.0), (n_lo, n_max), delta)
