"""Pointwise ranks of curve ensembles and rank-based Monte Carlo p-values.

An ensemble collects ``s`` test vectors of common length ``d``, the first
of which is the observed one.  Every entry is ranked within its column,
ties averaged, and the ranks are folded according to the direction in
which values count as extreme.  From the rank matrix we derive

* the extreme rank of each vector (its most extreme pointwise rank),
* the extreme rank length measure, which breaks the heavy ties of the
  extreme rank by comparing whole sorted rank rows lexicographically,
* the Monte Carlo p-value triple (liberal, extreme-rank-length,
  conservative).

Tie-averaged ranks are half-integers, so the matrix is stored doubled as
int64.  That keeps every downstream comparison exact; no float rank ever
enters an ordering decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import rankdata

from .errors import InvalidInputError

__all__ = [
    "Sidedness",
    "TestVectorEnsemble",
    "RankMatrix",
    "ErlMeasures",
    "PValueTriple",
    "compute_pointwise_ranks",
    "compute_extreme_ranks",
    "erl_precedes",
    "compute_erl_measures",
    "compute_p_values",
]


class Sidedness(Enum):
    """Direction in which ensemble values count as extreme."""

    TWO_SIDED = "two-sided"
    LOWER_EXTREME = "one-sided-lower-extreme"  # small values are extreme
    UPPER_EXTREME = "one-sided-upper-extreme"  # large values are extreme


@dataclass(frozen=True)
class TestVectorEnsemble:
    """``s`` test vectors of length ``d``; row 0 is the observed vector.

    ``+inf`` entries are allowed (degenerate F statistics) and rank above
    every finite value.  ``nan`` and ``-inf`` are rejected.
    """

    # not a test case, despite the class name
    __test__ = False

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise InvalidInputError("ensemble must be a 2-d array of shape (s, d)")
        s, d = values.shape
        if s < 2 or d < 1:
            raise InvalidInputError(f"ensemble needs s >= 2 rows and d >= 1 columns, got {s}x{d}")
        if np.isnan(values).any():
            raise InvalidInputError("ensemble entries must not be nan")
        if np.isneginf(values).any():
            raise InvalidInputError("ensemble entries must be finite or +inf")
        object.__setattr__(self, "values", values)

    @property
    def n_vectors(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]

    @property
    def observed(self) -> np.ndarray:
        """The observed test vector (by convention the first row)."""
        return self.values[0]


@dataclass(frozen=True)
class RankMatrix:
    """Sidedness-folded pointwise ranks of an ensemble.

    ``ranks2`` holds the ranks doubled (int64) so that the half-integers
    produced by tie averaging stay exact.  Rank 1 (stored as 2) always
    marks the most extreme value for the requested direction.
    """

    ranks2: np.ndarray
    sidedness: Sidedness

    def __post_init__(self):
        ranks2 = np.asarray(self.ranks2)
        if ranks2.ndim != 2:
            raise InvalidInputError("rank matrix must be 2-d")
        if not np.issubdtype(ranks2.dtype, np.integer):
            raise InvalidInputError("doubled ranks must be integers")
        object.__setattr__(self, "ranks2", ranks2.astype(np.int64, copy=False))

    @classmethod
    def from_ranks(cls, ranks, sidedness: Sidedness) -> "RankMatrix":
        """Build from plain (possibly half-integer) rank values."""
        ranks = np.asarray(ranks, dtype=np.float64)
        doubled = np.rint(2.0 * ranks)
        if not np.array_equal(doubled, 2.0 * ranks):
            raise InvalidInputError("ranks must be integers or half-integers")
        return cls(doubled.astype(np.int64), sidedness)

    @property
    def n_vectors(self) -> int:
        return self.ranks2.shape[0]

    @property
    def length(self) -> int:
        return self.ranks2.shape[1]

    @property
    def ranks(self) -> np.ndarray:
        """Ranks as floats (half-integers where values tied)."""
        return self.ranks2 / 2.0


@dataclass(frozen=True)
class ErlMeasures:
    """Extreme rank length measure of every ensemble vector.

    ``precede_counts[i]`` is the number of vectors whose ascending-sorted
    rank row strictly precedes vector ``i``'s in lexicographic order;
    the measure itself is that count divided by ``s``.  Vectors with
    identical sorted rows share a count.
    """

    precede_counts: np.ndarray
    sorted_ranks2: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.precede_counts)
        rows = np.asarray(self.sorted_ranks2)
        if counts.ndim != 1 or rows.ndim != 2 or counts.shape[0] != rows.shape[0]:
            raise InvalidInputError("measure counts and sorted rank rows must align")
        s = counts.shape[0]
        if counts.min(initial=0) < 0 or counts.max(initial=0) > s - 1:
            raise InvalidInputError("precede counts must lie in [0, s-1]")
        object.__setattr__(self, "precede_counts", counts.astype(np.int64, copy=False))
        object.__setattr__(self, "sorted_ranks2", rows.astype(np.int64, copy=False))

    @property
    def n_vectors(self) -> int:
        return self.precede_counts.shape[0]

    @property
    def measures(self) -> np.ndarray:
        return self.precede_counts / self.n_vectors

    @property
    def sorted_rank_rows(self) -> np.ndarray:
        return self.sorted_ranks2 / 2.0


@dataclass(frozen=True)
class PValueTriple:
    """Monte Carlo p-values of one test: liberal < erl <= conservative."""

    p_minus: float
    p_erl: float
    p_plus: float


def compute_pointwise_ranks(ensemble: TestVectorEnsemble, sidedness: Sidedness) -> RankMatrix:
    """Rank every ensemble entry within its column, ties averaged.

    Raw rank 1 marks the smallest value of a column.  The sidedness fold
    then maps a raw rank ``r`` to ``r`` (small extreme), ``s + 1 - r``
    (large extreme) or ``min(r, s + 1 - r)`` (two-sided), so rank 1
    always marks the most extreme value for the requested direction.
    """
    if not isinstance(sidedness, Sidedness):
        raise InvalidInputError(f"unknown sidedness: {sidedness!r}")
    s = ensemble.n_vectors
    # Tie averages are half-integers, so doubling gives exact int64.
    raw2 = np.rint(2.0 * rankdata(ensemble.values, method="average", axis=0)).astype(np.int64)
    if sidedness is Sidedness.LOWER_EXTREME:
        ranks2 = raw2
    elif sidedness is Sidedness.UPPER_EXTREME:
        ranks2 = 2 * (s + 1) - raw2
    else:
        ranks2 = np.minimum(raw2, 2 * (s + 1) - raw2)
    return RankMatrix(ranks2, sidedness)


def compute_extreme_ranks(ranks: RankMatrix) -> np.ndarray:
    """Most extreme (smallest) pointwise rank of each vector."""
    return ranks.ranks2.min(axis=1) / 2.0


def erl_precedes(a, b) -> bool:
    """Strict lexicographic order between two ascending-sorted rank rows.

    Returns True when ``a`` is the more extreme row: at the first index
    where the rows differ, ``a`` is smaller.  Equal rows compare False.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise InvalidInputError("sorted rank rows must be 1-d and of equal length")
    if np.any(np.diff(a) < 0) or np.any(np.diff(b) < 0):
        raise InvalidInputError("rank rows must be sorted ascending")
    unequal = np.nonzero(a != b)[0]
    if unequal.size == 0:
        return False
    first = unequal[0]
    return bool(a[first] < b[first])


def compute_erl_measures(
    ranks: RankMatrix, *, tie_break: np.random.Generator | None = None
) -> ErlMeasures:
    """Extreme rank length measure of every vector.

    Each vector's ranks are sorted ascending and the rows are ordered
    lexicographically; the measure of row ``i`` is the fraction of rows
    that strictly precede it.  Rows with identical sorted ranks share a
    measure, which keeps the resulting p-value conservative.  Pass a
    seeded generator as ``tie_break`` to instead split such groups into
    a uniformly random strict order.
    """
    sorted2 = np.sort(ranks.ranks2, axis=1)
    _, inverse, counts = np.unique(sorted2, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    before = np.concatenate(([0], np.cumsum(counts[:-1])))
    precede = before[inverse]
    if tie_break is not None:
        for cls in np.nonzero(counts > 1)[0]:
            members = np.nonzero(inverse == cls)[0]
            precede[members] += tie_break.permutation(members.size)
    return ErlMeasures(precede, sorted2)


def compute_p_values(ranks: RankMatrix, erl: ErlMeasures) -> PValueTriple:
    """Monte Carlo p-value triple of the observed vector (row 0).

    ``p_plus`` counts rows whose extreme rank is at least as extreme as
    the observed one, ``p_minus`` only strictly more extreme rows, and
    ``p_erl`` counts rows at or before the observed row in extreme rank
    length order.  Always ``p_minus < p_erl <= p_plus`` and
    ``p_erl >= 1/s``.
    """
    s = ranks.n_vectors
    if erl.n_vectors != s:
        raise InvalidInputError("rank matrix and measures disagree on ensemble size")
    extreme2 = ranks.ranks2.min(axis=1)
    p_plus = int(np.count_nonzero(extreme2 <= extreme2[0])) / s
    p_minus = int(np.count_nonzero(extreme2 < extreme2[0])) / s
    p_erl = int(np.count_nonzero(erl.precede_counts <= erl.precede_counts[0])) / s
    return PValueTriple(p_minus=p_minus, p_erl=p_erl, p_plus=p_plus)
