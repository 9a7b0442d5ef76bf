"""One-sided symbolic spaces, subshifts and shift-invariant measures.

Letters run over ``{1..a}``.  A word indexes a cylinder; a subshift is either
the full shift or a subshift of finite type given by an ``a x a`` 0/1 letter
transition matrix.  Measures are Bernoulli or stationary Markov, the two
families whose cylinder masses have closed forms.  Entropies are in nats
throughout; dimension formulas downstream divide by the log of the metric
contraction in the same base.

Large word sets are handled as sorted ``int64`` arrays of base-``a`` codes
(``code = sum (letter_j - 1) * a**(n - j)``), which keeps lexicographic order
equal to numeric order.  ``Word`` objects are the friendly per-word view.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, NonStationaryWarning, NotIrreducible

DEFAULT_WORD_CAP = 20_000_000

__all__ = [
    "DEFAULT_WORD_CAP",
    "Word",
    "Subshift",
    "SymbolicMeasure",
    "codes_to_letters",
    "letters_to_codes",
]


def _xlogx(p: np.ndarray) -> np.ndarray:
    """x*log(x) with the 0*log(0) = 0 convention."""
    out = np.zeros_like(p, dtype=float)
    pos = p > 0
    out[pos] = p[pos] * np.log(p[pos])
    return out


def codes_to_letters(codes: np.ndarray, length: int, alphabet_size: int) -> np.ndarray:
    """Decode base-``a`` word codes into an ``(N, length)`` uint8 letter matrix."""
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty((codes.size, length), dtype=np.uint8)
    rem = codes
    for j in range(length - 1, -1, -1):
        rem, digit = np.divmod(rem, alphabet_size)
        out[:, j] = digit + 1
    return out


def letters_to_codes(letters: np.ndarray, alphabet_size: int) -> np.ndarray:
    letters = np.asarray(letters, dtype=np.int64)
    codes = np.zeros(letters.shape[0], dtype=np.int64)
    for j in range(letters.shape[1]):
        codes = codes * alphabet_size + (letters[:, j] - 1)
    return codes


@dataclass(frozen=True, slots=True)
class Word:
    """A finite word over ``{1..alphabet_size}``; empty = the full cylinder."""

    letters: tuple[int, ...]
    alphabet_size: int

    def __post_init__(self):
        if self.alphabet_size < 2:
            raise ValueError("alphabet_size must be >= 2")
        for l in self.letters:
            if not 1 <= l <= self.alphabet_size:
                raise ValueError(f"letter {l} outside 1..{self.alphabet_size}")

    @classmethod
    def from_string(cls, s: str, alphabet_size: int) -> "Word":
        return cls(tuple(int(c) for c in s), alphabet_size)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return "".join(str(l) for l in self.letters) if self.letters else "<empty>"

    def concat(self, other: "Word") -> "Word":
        if other.alphabet_size != self.alphabet_size:
            raise ValueError("alphabet mismatch")
        return Word(self.letters + other.letters, self.alphabet_size)

    def prefix(self, k: int) -> "Word":
        return Word(self.letters[:k], self.alphabet_size)


def _int_matmul(A: list[list[int]], B: list[list[int]]) -> list[list[int]]:
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class Subshift:
    """Full shift or subshift of finite type on ``{1..a}^N``.

    ``transition[i][j] == 1`` allows letter ``i+1`` to be followed by ``j+1``.
    ``transition is None`` means the full shift.
    """

    alphabet_size: int
    transition: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if self.alphabet_size < 2:
            raise ValueError("alphabet_size must be >= 2")
        if self.transition is not None:
            a = self.alphabet_size
            if len(self.transition) != a or any(len(r) != a for r in self.transition):
                raise ValueError("transition matrix must be a x a")
            if any(v not in (0, 1) for r in self.transition for v in r):
                raise ValueError("transition entries must be 0/1")
            if any(sum(r) == 0 for r in self.transition):
                # Letters with no successor would make deeper word sets empty;
                # they are legal as a matrix but useless, so reject early only
                # if *every* letter is a dead end.
                if all(sum(r) == 0 for r in self.transition):
                    raise ValueError("transition matrix has no allowed pair")

    # -- constructors ---------------------------------------------------

    @classmethod
    def full(cls, alphabet_size: int) -> "Subshift":
        return cls(alphabet_size)

    @classmethod
    def sft(cls, matrix: Sequence[Sequence[int]]) -> "Subshift":
        rows = tuple(tuple(int(v) for v in r) for r in matrix)
        return cls(len(rows), rows)

    @classmethod
    def golden_mean(cls) -> "Subshift":
        """Two letters, the pair '22' forbidden."""
        return cls.sft([[1, 1], [1, 0]])

    # -- structure ------------------------------------------------------

    @property
    def is_full_shift(self) -> bool:
        return self.transition is None

    def matrix(self) -> np.ndarray:
        if self.transition is None:
            return np.ones((self.alphabet_size, self.alphabet_size), dtype=np.int64)
        return np.array(self.transition, dtype=np.int64)

    def is_irreducible(self) -> bool:
        if self.transition is None:
            return True
        A = self.matrix() > 0
        a = self.alphabet_size
        reach = A | np.eye(a, dtype=bool)
        for _ in range(a):
            reach = reach | (reach @ reach)
        return bool(reach.all())

    # -- word enumeration ------------------------------------------------

    def _live_letters(self) -> np.ndarray:
        """0-based letters from which infinite admissible continuations exist.

        A word indexes a nonempty cylinder of the subshift exactly when its
        adjacent pairs are allowed and its last letter is live; on irreducible
        systems every letter is live and the pair rule alone decides.
        """
        if self.transition is None:
            return np.arange(self.alphabet_size)
        A = self.matrix() > 0
        live = np.ones(self.alphabet_size, dtype=bool)
        for _ in range(self.alphabet_size + 1):
            new = (A[:, live].sum(axis=1) > 0) & live
            if new.sum() == live.sum():
                break
            live = new
        return np.flatnonzero(live)

    def word_count(self, n: int) -> int:
        """Exact number of admissible length-n words (Python integers)."""
        if n < 0:
            raise ValueError("n must be >= 0")
        if n == 0:
            return 1
        if self.transition is None:
            return self.alphabet_size ** n
        live = self._live_letters()
        if live.size == 0:
            return 0
        # row sums of the live-restricted A^(n-1), summed over starting letters
        sub = self.matrix()[np.ix_(live, live)]
        A = [list(map(int, row)) for row in sub]
        size = live.size
        power = [[int(i == j) for j in range(size)] for i in range(size)]
        k = n - 1
        base = A
        while k:
            if k & 1:
                power = _int_matmul(power, base)
            base = _int_matmul(base, base)
            k >>= 1
        return sum(sum(row) for row in power)

    def admissible_codes(self, n: int, cap: int = DEFAULT_WORD_CAP) -> np.ndarray:
        """Sorted int64 codes of the admissible length-n words."""
        if n < 0:
            raise ValueError("n must be >= 0")
        count = self.word_count(n)
        if count > cap:
            raise CapExceeded(count, cap, what="words")
        if n * math.log2(self.alphabet_size) > 62:
            raise CapExceeded(self.alphabet_size ** n, 2 ** 62, what="code range")
        if n == 0:
            return np.zeros(1, dtype=np.int64)
        a = self.alphabet_size
        if self.transition is None:
            codes = np.arange(a, dtype=np.int64)
            for _ in range(n - 1):
                codes = (codes[:, None] * a + np.arange(a, dtype=np.int64)[None, :]).ravel()
            return codes
        live = self._live_letters()
        codes = live.astype(np.int64)
        last = codes.copy()
        live_mask = np.zeros(a, dtype=bool)
        live_mask[live] = True
        allowed = [
            np.flatnonzero(np.array(row, dtype=np.int64) * live_mask) for row in self.transition
        ]
        for _ in range(n - 1):
            parts = []
            last_parts = []
            for v in range(a):
                mask = last == v
                if not mask.any():
                    continue
                nxt = allowed[v]
                parts.append((codes[mask][:, None] * a + nxt[None, :]).ravel())
                last_parts.append(np.broadcast_to(nxt, (int(mask.sum()), nxt.size)).ravel())
            codes = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
            last = np.concatenate(last_parts) if last_parts else np.empty(0, dtype=np.int64)
            order = np.argsort(codes, kind="stable")
            codes = codes[order]
            last = last[order]
        return codes

    def admissible_words(self, n: int, cap: int = DEFAULT_WORD_CAP) -> list[Word]:
        """The set X_n as Word objects, lexicographically sorted."""
        codes = self.admissible_codes(n, cap)
        letters = codes_to_letters(codes, n, self.alphabet_size)
        a = self.alphabet_size
        return [Word(tuple(int(v) for v in row), a) for row in letters]

    def step_allowed(self, last_letters: np.ndarray) -> list[np.ndarray]:
        """Per-letter successor tables used by tree walks; internal helper."""
        if self.transition is None:
            nxt = np.arange(1, self.alphabet_size + 1, dtype=np.int64)
            return [nxt for _ in range(self.alphabet_size)]
        return [np.flatnonzero(np.array(row, dtype=np.int64)) + 1 for row in self.transition]

    # -- spectral quantities ----------------------------------------------

    def _perron(self, transpose: bool = False, tol: float = 1e-14, max_iter: int = 100_000):
        """Perron eigenvalue and positive eigenvector by shifted power iteration.

        Iterates with A + I so periodic matrices (e.g. permutations) converge.
        """
        if not self.is_irreducible():
            raise NotIrreducible("transition matrix is not irreducible")
        A = self.matrix().astype(float)
        if transpose:
            A = A.T
        a = self.alphabet_size
        M = A + np.eye(a)
        v = np.full(a, 1.0 / a)
        lam = 0.0
        for _ in range(max_iter):
            w = M @ v
            new_lam = w.max()
            w /= new_lam
            if abs(new_lam - lam) <= tol * new_lam and np.max(np.abs(w - v)) <= tol:
                v = w
                lam = new_lam
                break
            v = w
            lam = new_lam
        v = v / v.sum()
        return lam - 1.0, v

    def topological_entropy(self) -> float:
        """log of the Perron eigenvalue; log(a) for the full shift."""
        if self.transition is None:
            return math.log(self.alphabet_size)
        lam, _ = self._perron()
        return math.log(lam)

    def parry_measure(self) -> "SymbolicMeasure":
        """The Markov measure of maximal entropy of an irreducible SFT."""
        if self.transition is None:
            a = self.alphabet_size
            return SymbolicMeasure.bernoulli([1.0 / a] * a)
        lam, v = self._perron()
        _, u = self._perron(transpose=True)
        A = self.matrix().astype(float)
        P = A * v[None, :] / (lam * v[:, None])
        pi = u * v
        pi = pi / pi.sum()
        return SymbolicMeasure.markov(pi, P, _check_stationary=False)


@dataclass(frozen=True)
class SymbolicMeasure:
    """Bernoulli or stationary Markov measure on the one-sided shift."""

    kind: str  # "bernoulli" | "markov"
    probs: tuple[float, ...] | None = None
    initial: tuple[float, ...] | None = None
    transition: tuple[tuple[float, ...], ...] | None = None

    @classmethod
    def bernoulli(cls, probs: Iterable[float]) -> "SymbolicMeasure":
        p = tuple(float(x) for x in probs)
        if len(p) < 2:
            raise ValueError("need at least two letters")
        if any(x < 0 for x in p) or abs(sum(p) - 1.0) > 1e-12:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        return cls("bernoulli", probs=p)

    @classmethod
    def uniform(cls, alphabet_size: int) -> "SymbolicMeasure":
        return cls.bernoulli([1.0 / alphabet_size] * alphabet_size)

    @classmethod
    def markov(
        cls,
        initial: Iterable[float],
        transition: Sequence[Sequence[float]],
        _check_stationary: bool = True,
    ) -> "SymbolicMeasure":
        P = np.array([[float(v) for v in row] for row in transition], dtype=float)
        a = P.shape[0]
        if P.shape != (a, a) or a < 2:
            raise ValueError("transition must be square, a >= 2")
        if (P < -1e-15).any() or np.max(np.abs(P.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("transition rows must be probability vectors")
        pi = np.array([float(x) for x in initial], dtype=float)
        if pi.shape != (a,) or (pi < -1e-15).any() or abs(pi.sum() - 1.0) > 1e-12:
            raise ValueError("initial must be a probability vector of length a")
        if _check_stationary and np.max(np.abs(pi @ P - pi)) > 1e-10:
            pi = _stationary_of(P)
            warnings.warn(
                "initial distribution is not stationary; replaced by the "
                "stationary distribution of the transition matrix",
                NonStationaryWarning,
            )
        return cls(
            "markov",
            initial=tuple(float(x) for x in pi),
            transition=tuple(tuple(float(v) for v in row) for row in P),
        )

    # -- basic facts ------------------------------------------------------

    @property
    def alphabet_size(self) -> int:
        if self.kind == "bernoulli":
            return len(self.probs)
        return len(self.initial)

    def letter_probs(self) -> np.ndarray:
        """Marginal distribution of a single letter."""
        if self.kind == "bernoulli":
            return np.array(self.probs)
        return np.array(self.initial)

    def entropy(self) -> float:
        """Measure-theoretic entropy in nats (0*log 0 = 0).

        For Markov measures this is the asymptotic cylinder decay rate, which
        weights the transition rows by the stationary distribution; fibre
        measures restarted from a transition row therefore keep the entropy
        of the chain.
        """
        if self.kind == "bernoulli":
            return float(-_xlogx(np.array(self.probs)).sum())
        P = np.array(self.transition)
        pi = np.array(self.initial)
        if np.max(np.abs(pi @ P - pi)) > 1e-9:
            pi = _stationary_of(P)
        return float(-(pi[:, None] * _xlogx(P)).sum())

    # -- cylinder masses ----------------------------------------------------

    def cylinder_mass(self, u: Word | Sequence[int]) -> float:
        letters = u.letters if isinstance(u, Word) else tuple(u)
        if not letters:
            return 1.0
        for l in letters:
            if not 1 <= l <= self.alphabet_size:
                raise ValueError(f"letter {l} outside alphabet")
        if self.kind == "bernoulli":
            p = self.probs
            out = 1.0
            for l in letters:
                out *= p[l - 1]
            return out
        P = self.transition
        out = self.initial[letters[0] - 1]
        for prev, cur in zip(letters, letters[1:]):
            out *= P[prev - 1][cur - 1]
        return out

    def cylinder_mass_batch(self, letters: np.ndarray) -> np.ndarray:
        """Vector of cylinder masses for an (N, n) letter matrix."""
        letters = np.asarray(letters)
        if letters.ndim != 2:
            raise ValueError("expected a 2-d letter matrix")
        if letters.shape[1] == 0:
            return np.ones(letters.shape[0])
        if self.kind == "bernoulli":
            p = np.array(self.probs)
            out = p[letters[:, 0] - 1].copy()
            for j in range(1, letters.shape[1]):
                out *= p[letters[:, j] - 1]
            return out
        P = np.array(self.transition)
        out = np.array(self.initial)[letters[:, 0] - 1].copy()
        for j in range(1, letters.shape[1]):
            out *= P[letters[:, j - 1] - 1, letters[:, j] - 1]
        return out

    def step_probs(self, last_letter: int | None) -> np.ndarray:
        """Next-letter distribution given the last emitted letter (None = first)."""
        if self.kind == "bernoulli" or last_letter is None:
            return self.letter_probs()
        return np.array(self.transition[last_letter - 1])

    # -- conditioning on the past --------------------------------------------

    def fibre(self, last_past_letter: int) -> "SymbolicMeasure":
        """Conditional law of the future given a past ending in the letter.

        For a Markov measure the conditional distribution of the future given
        the whole past depends on the last past symbol only: it is the chain
        restarted from the corresponding transition row.  Bernoulli measures
        are their own fibres by independence.
        """
        if not 1 <= last_past_letter <= self.alphabet_size:
            raise ValueError("letter outside alphabet")
        if self.kind == "bernoulli":
            return self
        row = self.transition[last_past_letter - 1]
        return SymbolicMeasure("markov", initial=tuple(row), transition=self.transition)

    # -- sampling ---------------------------------------------------------

    def sample_letters(self, n: int, count: int, rng: np.random.Generator) -> np.ndarray:
        """(count, n) letter matrix of i.i.d. words drawn from the measure."""
        if n < 0:
            raise ValueError("n must be >= 0")
        out = np.empty((count, n), dtype=np.uint8)
        if n == 0:
            return out
        if self.kind == "bernoulli":
            cum = np.cumsum(self.probs)
            u = rng.random((count, n))
            out[:] = np.searchsorted(cum, u, side="right").astype(np.uint8) + 1
            np.minimum(out, self.alphabet_size, out=out)
            return out
        P = np.array(self.transition)
        cumP = np.cumsum(P, axis=1)
        cum0 = np.cumsum(self.initial)
        u = rng.random((count, n))
        cur = np.searchsorted(cum0, u[:, 0], side="right").astype(np.int64)
        np.minimum(cur, self.alphabet_size - 1, out=cur)
        out[:, 0] = cur + 1
        for j in range(1, n):
            rows = cumP[cur]
            cur = (u[:, j : j + 1] >= rows).sum(axis=1)
            np.minimum(cur, self.alphabet_size - 1, out=cur)
            out[:, j] = cur + 1
        return out

    def sample_word(self, n: int, rng: np.random.Generator) -> Word:
        letters = self.sample_letters(n, 1, rng)[0]
        return Word(tuple(int(v) for v in letters), self.alphabet_size)


def _stationary_of(P: np.ndarray) -> np.ndarray:
    """Stationary distribution of an irreducible stochastic matrix."""
    a = P.shape[0]
    M = P.T + np.eye(a)
    v = np.full(a, 1.0 / a)
    for _ in range(200_000):
        w = M @ v
        w /= w.sum()
        if np.max(np.abs(w - v)) <= 1e-15:
            return w
        v = w
    return v
