"""Random multiplicative cascades and percolation on symbolic trees.

The i.i.d. weight family is indexed by finite words, so the generator keys
every draw to its word instead of consuming a sequential stream: the weight
at a word is a pure function of (master seed, word).  That makes lazy
pruning, depth extension and parallel subtree generation reproduce the same
realization bit for bit.

Hashing: a word is encoded as its length followed by its one-byte letters,
and absorbed token by token through the splitmix64 finalizer (the published
64-bit avalanche mixer); uniforms take the top 53 bits of the final state.
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import ndtri

from .errors import CapExceeded, DegenerateCascadeWarning
from .symbolic import (
    DEFAULT_WORD_CAP,
    Subshift,
    SymbolicMeasure,
    Word,
    codes_to_letters,
)

__all__ = [
    "KeyedRng",
    "WeightLaw",
    "CylinderMeasure",
    "draw_weight",
    "cascade_measure",
    "percolation_set",
    "percolation_codes",
    "cascade_mass_trace",
]

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_LEN_SALT = np.uint64(0x9E3779B97F4A7C15)
_LETTER_SALT = np.uint64(0xD1B54A32D192ED03)
_STREAM_SALT = np.uint64(0x2545F4914F6CDD1D)
_COUNTER_SALT = np.uint64(0x8CB92BA72F3D8DD7)
_U53 = 2.0**-53


def _mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, elementwise on uint64 arrays."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def _to_uniform(h: np.ndarray) -> np.ndarray:
    # strictly inside (0,1): safe for inverse-CDF transforms
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * _U53


@dataclass(frozen=True)
class KeyedRng:
    """Deterministic word-keyed randomness: weight(u) = f(master_seed, u)."""

    master_seed: int

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & 0xFFFFFFFFFFFFFFFF)

    def _root(self) -> np.ndarray:
        return _mix64(np.array([self.master_seed], dtype=np.uint64))

    def word_hashes(self, letters: np.ndarray) -> np.ndarray:
        """Hashes for an (N, k) letter matrix: absorb length, then each letter."""
        letters = np.asarray(letters)
        n, k = letters.shape
        with np.errstate(over="ignore"):
            h = np.broadcast_to(self._root(), (n,)).copy()
            h = _mix64(h ^ (_LEN_SALT + np.uint64(k)))
            for j in range(k):
                h = _mix64(h ^ (_LETTER_SALT + letters[:, j].astype(np.uint64)))
        return h

    def word_uniform(self, u: Word | Sequence[int]) -> float:
        letters = u.letters if isinstance(u, Word) else tuple(u)
        mat = np.array([letters], dtype=np.uint64).reshape(1, len(letters))
        return float(_to_uniform(self.word_hashes(mat))[0])

    def counter_uniforms(self, salt: int, n: int, offset: int = 0) -> np.ndarray:
        """Deterministic uniform stream keyed by (salt, index); for samplers."""
        with np.errstate(over="ignore"):
            base = _mix64(self._root() ^ (_STREAM_SALT + np.uint64(salt & 0xFFFFFFFFFFFFFFFF)))
            idx = np.arange(offset, offset + n, dtype=np.uint64)
            h = _mix64(base ^ (_COUNTER_SALT + idx))
        return _to_uniform(h)

    def derive(self, index: int) -> "KeyedRng":
        """An independent child stream; used for trial and factor seeds."""
        with np.errstate(over="ignore"):
            h = _mix64(self._root() ^ (_STREAM_SALT + np.uint64(index & 0xFFFFFFFFFFFFFFFF)))
            h = _mix64(h ^ _COUNTER_SALT)
        return KeyedRng(int(h[0]))


@dataclass(frozen=True)
class WeightLaw:
    """Mean-one nonnegative weight law V for the cascade multipliers."""

    kind: str  # "percolation" | "discrete" | "lognormal"
    p: float | None = None
    sigma: float | None = None
    values: tuple[float, ...] | None = None
    probs: tuple[float, ...] | None = None

    @classmethod
    def percolation(cls, p: float) -> "WeightLaw":
        """V = 1/p with probability p, else 0."""
        if not 0.0 < p <= 1.0:
            raise ValueError("p must be in (0,1]")
        return cls("percolation", p=float(p))

    @classmethod
    def lognormal(cls, sigma: float) -> "WeightLaw":
        """exp(sigma*Z - sigma^2/2): location pinned so E(V) = 1."""
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        return cls("lognormal", sigma=float(sigma))

    @classmethod
    def discrete(cls, values: Iterable[float], probs: Iterable[float]) -> "WeightLaw":
        v = tuple(float(x) for x in values)
        q = tuple(float(x) for x in probs)
        if len(v) != len(q) or not v:
            raise ValueError("values and probs must match and be nonempty")
        if any(x < 0 for x in v) or any(x < 0 for x in q):
            raise ValueError("values and probs must be nonnegative")
        if abs(sum(q) - 1.0) > 1e-12:
            raise ValueError("probs must sum to 1")
        mean = sum(vi * qi for vi, qi in zip(v, q))
        if abs(mean - 1.0) > 1e-10:
            raise ValueError(f"E(V) must be 1, got {mean!r}")
        return cls("discrete", values=v, probs=q)

    def weight_entropy(self) -> float:
        """h_V = E(V log V), the entropy cost of the cascade, in nats."""
        if self.kind == "percolation":
            return -np.log(self.p)
        if self.kind == "lognormal":
            return self.sigma**2 / 2.0
        total = 0.0
        for v, q in zip(self.values, self.probs):
            if v > 0 and q > 0:
                total += q * v * np.log(v)
        return total

    def weights_from_uniforms(self, u: np.ndarray) -> np.ndarray:
        if self.kind == "percolation":
            return np.where(u < self.p, 1.0 / self.p, 0.0)
        if self.kind == "lognormal":
            s = self.sigma
            return np.exp(s * ndtri(u) - s * s / 2.0)
        cum = np.cumsum(self.probs)
        idx = np.minimum(np.searchsorted(cum, u, side="right"), len(self.values) - 1)
        return np.asarray(self.values)[idx]


def draw_weight(law: WeightLaw, rng: KeyedRng, u: Word | Sequence[int]) -> float:
    """One realization of V keyed to the word; repeated calls are identical."""
    return float(law.weights_from_uniforms(np.array([rng.word_uniform(u)]))[0])


class CylinderMeasure:
    """Depth-n discretization of a measure: mass per admissible length-n word.

    Words are stored as sorted base-a codes; ``masses`` aligns with ``codes``.
    Treated as immutable once built.
    """

    def __init__(
        self,
        codes: np.ndarray,
        masses: np.ndarray,
        depth: int,
        alphabet_size: int,
        meta: dict | None = None,
    ):
        self.codes = np.asarray(codes, dtype=np.int64)
        self.masses = np.asarray(masses, dtype=np.float64)
        if self.codes.shape != self.masses.shape:
            raise ValueError("codes and masses must align")
        self.depth = int(depth)
        self.alphabet_size = int(alphabet_size)
        self.meta = dict(meta or {})

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def is_degenerate(self) -> bool:
        return not (self.masses > 0).any()

    def letters(self) -> np.ndarray:
        return codes_to_letters(self.codes, self.depth, self.alphabet_size)

    def words(self) -> list[Word]:
        return [
            Word(tuple(int(v) for v in row), self.alphabet_size) for row in self.letters()
        ]

    def mass_of(self, u: Word | Sequence[int]) -> float:
        letters = u.letters if isinstance(u, Word) else tuple(u)
        if len(letters) != self.depth:
            raise ValueError("word length must equal the measure depth")
        code = 0
        for l in letters:
            code = code * self.alphabet_size + (l - 1)
        i = np.searchsorted(self.codes, code)
        if i < len(self.codes) and self.codes[i] == code:
            return float(self.masses[i])
        return 0.0

    def positive_codes(self) -> np.ndarray:
        return self.codes[self.masses > 0]

    def coarsen(self, depth: int) -> "CylinderMeasure":
        """Sum masses over suffixes down to the requested depth.

        Implemented as repeated one-level coarsenings so that coarsening in
        steps and coarsening directly are bitwise identical.
        """
        if not 0 <= depth <= self.depth:
            raise ValueError("coarsen depth out of range")
        cur = self
        while cur.depth > depth:
            if len(cur.codes) == 0:
                cur = CylinderMeasure(
                    cur.codes, cur.masses, cur.depth - 1, cur.alphabet_size, cur.meta
                )
                continue
            parents = cur.codes // cur.alphabet_size
            starts = np.flatnonzero(np.concatenate([[True], parents[1:] != parents[:-1]]))
            sums = np.add.reduceat(cur.masses, starts)
            cur = CylinderMeasure(
                parents[starts], sums, cur.depth - 1, cur.alphabet_size, cur.meta
            )
        return cur

    def to_csv(self, path) -> None:
        letters = self.letters()
        with open(path, "w") as fh:
            fh.write("word,mass\n")
            for row, mass in zip(letters, self.masses):
                fh.write("".join(str(int(v)) for v in row))
                fh.write(f",{mass:.17g}\n")

    def __len__(self) -> int:
        return len(self.codes)


def _walk_level(
    base: SymbolicMeasure,
    x: Subshift,
    law: WeightLaw | None,
    rng: KeyedRng,
    codes: np.ndarray,
    masses: np.ndarray,
    level: int,
    prune: bool,
):
    """Extend one tree level: admissible children, base factor, keyed weight."""
    a = x.alphabet_size
    if x.is_full_shift and base.kind == "bernoulli":
        child_codes = (codes[:, None] * a + np.arange(a, dtype=np.int64)[None, :]).ravel()
        step = np.asarray(base.probs)
        child_masses = (masses[:, None] * step[None, :]).ravel()
    else:
        last = (codes % a).astype(np.int64)  # 0-based last letter; level >= 1
        A = x.matrix() > 0
        parts_c, parts_m = [], []
        P = None
        if base.kind == "markov":
            P = np.array(base.transition)
        for v in range(a):
            mask = last == v
            if not mask.any():
                continue
            nxt = np.flatnonzero(A[v])
            if nxt.size == 0:
                continue
            if base.kind == "bernoulli":
                step = np.asarray(base.probs)[nxt]
            else:
                step = P[v, nxt]
            parts_c.append((codes[mask][:, None] * a + nxt[None, :]).ravel())
            parts_m.append((masses[mask][:, None] * step[None, :]).ravel())
        if not parts_c:
            return np.empty(0, dtype=np.int64), np.empty(0)
        child_codes = np.concatenate(parts_c)
        child_masses = np.concatenate(parts_m)
        order = np.argsort(child_codes, kind="stable")
        child_codes = child_codes[order]
        child_masses = child_masses[order]
    if law is not None:
        letters = codes_to_letters(child_codes, level, a)
        u = _to_uniform(rng.word_hashes(letters))
        child_masses = child_masses * law.weights_from_uniforms(u)
    if prune:
        keep = child_masses > 0
        child_codes = child_codes[keep]
        child_masses = child_masses[keep]
    return child_codes, child_masses


def _first_letter_roots(base: SymbolicMeasure, x: Subshift, law, rng, prune):
    a = x.alphabet_size
    codes = np.arange(a, dtype=np.int64)
    masses = base.letter_probs().astype(np.float64).copy()
    if law is not None:
        letters = codes_to_letters(codes, 1, a)
        u = _to_uniform(rng.word_hashes(letters))
        masses = masses * law.weights_from_uniforms(u)
    if prune:
        keep = masses > 0
        codes, masses = codes[keep], masses[keep]
    return codes, masses


def _grow(base, x, law, rng, depth, cap, prune, collect_trace=False, workers: int = 1):
    """Level-by-level tree walk shared by the cascade generators."""
    if base.alphabet_size != x.alphabet_size:
        raise ValueError("measure and subshift alphabets differ")
    if depth < 1:
        raise ValueError("depth must be >= 1")

    def run(codes, masses, start_level):
        trace = []
        for level in range(start_level, depth + 1):
            if level > start_level:
                codes_local, masses_local = _walk_level(
                    base, x, law, rng, codes, masses, level, prune
                )
                codes, masses = codes_local, masses_local
            if len(codes) > cap:
                raise CapExceeded(len(codes), cap, what="tree nodes")
            if collect_trace:
                trace.append(float(masses.sum()))
            if len(codes) == 0:
                if collect_trace:
                    trace.extend(0.0 for _ in range(depth - level))
                break
        return codes, masses, trace

    roots_c, roots_m = _first_letter_roots(base, x, law, rng, prune)
    if workers <= 1 or len(roots_c) <= 1 or collect_trace:
        codes, masses, trace = run(roots_c, roots_m, 1)
        return codes, masses, trace
    # parallel over first-letter subtrees; keyed weights make the result
    # identical to the serial walk, so subtrees just concatenate in order
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futs = [
            pool.submit(run, roots_c[i : i + 1], roots_m[i : i + 1], 1)
            for i in range(len(roots_c))
        ]
        results = [f.result() for f in futs]
    codes = np.concatenate([r[0] for r in results]) if results else np.empty(0, dtype=np.int64)
    masses = np.concatenate([r[1] for r in results]) if results else np.empty(0)
    return codes, masses, []


def cascade_measure(
    base: SymbolicMeasure,
    x: Subshift,
    law: WeightLaw,
    depth: int,
    rng: KeyedRng,
    cap: int = DEFAULT_WORD_CAP,
    workers: int = 1,
) -> CylinderMeasure:
    """One realization of the depth-n cascade stage of the base measure.

    mass(u) = (product of keyed weights along the prefixes of u) * base([u])
    for every admissible u of length ``depth``; zero-weight subtrees are
    pruned without touching their descendants.
    """
    meta = {"law": law.kind, "seed": rng.master_seed}
    h_v = law.weight_entropy()
    h_mu = base.entropy()
    if h_v >= h_mu:
        meta["degenerate_regime"] = True
        warnings.warn(
            f"weight entropy {h_v:.6g} >= base entropy {h_mu:.6g}: "
            "the cascade limit is degenerate (finite stages still computed)",
            DegenerateCascadeWarning,
        )
    codes, masses, _ = _grow(base, x, law, rng, depth, cap, prune=True, workers=workers)
    return CylinderMeasure(codes, masses, depth, x.alphabet_size, meta)


def percolation_codes(
    x: Subshift, p: float, depth: int, rng: KeyedRng, cap: int = DEFAULT_WORD_CAP
) -> np.ndarray:
    """Codes of the admissible depth-n words whose every prefix weight is positive."""
    law = WeightLaw.percolation(p)
    base = SymbolicMeasure.uniform(x.alphabet_size)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateCascadeWarning)
        codes, _, _ = _grow(base, x, law, rng, depth, cap, prune=True)
    return codes


def percolation_set(
    x: Subshift, p: float, depth: int, rng: KeyedRng, cap: int = DEFAULT_WORD_CAP
) -> list[Word]:
    """The surviving depth-n words of the percolation with retention p."""
    codes = percolation_codes(x, p, depth, rng, cap)
    letters = codes_to_letters(codes, depth, x.alphabet_size)
    return [Word(tuple(int(v) for v in row), x.alphabet_size) for row in letters]


def cascade_mass_trace(
    base: SymbolicMeasure,
    x: Subshift,
    law: WeightLaw,
    depth: int,
    rng: KeyedRng,
    cap: int = DEFAULT_WORD_CAP,
) -> np.ndarray:
    """Total cascade mass per level k = 1..depth for one realization."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateCascadeWarning)
        _, _, trace = _grow(base, x, law, rng, depth, cap, prune=True, collect_trace=True)
    return np.asarray(trace)
