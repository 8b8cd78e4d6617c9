"""Global envelopes: simultaneous acceptance bands over a test vector.

The central band is the extreme rank length envelope: the componentwise
hull of the ensemble vectors whose extreme rank length measure reaches a
critical value chosen so that at most a fraction ``alpha`` of vectors
fall below it.  The observed vector leaving the band anywhere is, for
tie-free ensembles, exactly equivalent to ``p_erl <= alpha``.

Order-statistic (l-th smallest / l-th largest per column) envelopes are
provided as the coarser companion band; the extreme rank length envelope
is always contained in the matching one.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientPermutationsWarning, InvalidInputError
from .rankcore import ErlMeasures, Sidedness, TestVectorEnsemble

__all__ = [
    "GlobalEnvelope",
    "EnvelopeVerdict",
    "erl_critical_value",
    "erl_envelope",
    "rank_envelope_lth",
    "envelope_verdict",
]


@dataclass(frozen=True)
class GlobalEnvelope:
    """Componentwise band ``[lower, upper]`` over a test vector.

    ``included`` lists the (0-based) ensemble rows the band was built
    from; every one of them lies inside the band.  One-sided bands carry
    ``-inf`` / ``+inf`` on the unbounded side.  ``alpha`` is None for
    order-statistic envelopes requested by depth ``l`` rather than by
    level.
    """

    lower: np.ndarray
    upper: np.ndarray
    alpha: float | None
    included: np.ndarray
    kind: str
    sidedness: Sidedness

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise InvalidInputError("envelope bounds must be 1-d arrays of equal length")
        if np.any(lower > upper):
            raise InvalidInputError("envelope lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "included", np.asarray(self.included, dtype=np.int64))

    @property
    def length(self) -> int:
        return self.lower.shape[0]


@dataclass(frozen=True)
class EnvelopeVerdict:
    """Outcome of the graphical test: reject iff the observed vector
    leaves the (closed) envelope at one or more coordinates."""

    reject: bool
    outside_coordinates: np.ndarray

    def __post_init__(self):
        outside = np.asarray(self.outside_coordinates, dtype=np.int64)
        object.__setattr__(self, "outside_coordinates", outside)
        if bool(self.reject) != (outside.size > 0):
            raise InvalidInputError("reject flag must match presence of outside coordinates")


def _critical_count(erl: ErlMeasures, alpha: float) -> int:
    """Largest precede count whose strictly-below fraction stays within alpha."""
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha}")
    s = erl.n_vectors
    if s == 0:
        raise InvalidInputError("empty measures")
    if alpha * s < 1.0:
        warnings.warn(
            f"alpha * s = {alpha * s:.3g} < 1: the test cannot reject at this level; "
            "increase the number of permutations",
            InsufficientPermutationsWarning,
            stacklevel=3,
        )
    counts = np.sort(erl.precede_counts)
    candidates = np.unique(counts)
    below = np.searchsorted(counts, candidates, side="left")
    # Same arithmetic as the p-values: compare fractions of s to alpha.
    admissible = candidates[(below / s) <= alpha]
    return int(admissible[-1])


def erl_critical_value(erl: ErlMeasures, alpha: float) -> float:
    """Critical extreme rank length measure at level ``alpha``.

    The largest observed measure such that the fraction of vectors with
    strictly smaller measure is at most ``alpha``.  Warns when
    ``alpha * s < 1`` (too few permutations to ever reject).
    """
    return _critical_count(erl, alpha) / erl.n_vectors


def erl_envelope(
    ensemble: TestVectorEnsemble,
    erl: ErlMeasures,
    alpha: float,
    sidedness: Sidedness,
) -> GlobalEnvelope:
    """Extreme rank length envelope at level ``alpha``.

    Includes every vector whose measure reaches the critical value (ties
    at the critical value stay in) and takes componentwise min/max over
    the included vectors; the unused side of a one-sided band is
    infinite.
    """
    if erl.n_vectors != ensemble.n_vectors:
        raise InvalidInputError("ensemble and measures disagree on the number of vectors")
    if erl.sorted_ranks2.shape[1] != ensemble.length:
        raise InvalidInputError("ensemble and measures disagree on the vector length")
    crit = _critical_count(erl, alpha)
    included = np.nonzero(erl.precede_counts >= crit)[0]
    picked = ensemble.values[included]
    if sidedness is Sidedness.LOWER_EXTREME:
        lower = picked.min(axis=0)
        upper = np.full(ensemble.length, np.inf)
    elif sidedness is Sidedness.UPPER_EXTREME:
        lower = np.full(ensemble.length, -np.inf)
        upper = picked.max(axis=0)
    else:
        lower = picked.min(axis=0)
        upper = picked.max(axis=0)
    return GlobalEnvelope(
        lower=lower, upper=upper, alpha=alpha, included=included, kind="erl", sidedness=sidedness
    )


def rank_envelope_lth(
    ensemble: TestVectorEnsemble,
    l: int,
    sidedness: Sidedness = Sidedness.TWO_SIDED,
) -> GlobalEnvelope:
    """Order-statistic envelope of depth ``l``.

    Bounds are the l-th smallest and l-th largest value of each column; with
    a one-sided direction only the bounded side is kept.  Requires
    ``1 <= l <= floor((s + 1) / 2)``.
    """
    s = ensemble.n_vectors
    if not isinstance(l, (int, np.integer)) or not 1 <= int(l) <= (s + 1) // 2:
        raise InvalidInputError(f"depth must be an integer in [1, {(s + 1) // 2}], got {l!r}")
    l = int(l)
    ordered = np.sort(ensemble.values, axis=0)
    lower = ordered[l - 1]
    upper = ordered[s - l]
    if sidedness is Sidedness.LOWER_EXTREME:
        upper = np.full(ensemble.length, np.inf)
    elif sidedness is Sidedness.UPPER_EXTREME:
        lower = np.full(ensemble.length, -np.inf)
    inside = np.all((ensemble.values >= lower) & (ensemble.values <= upper), axis=1)
    return GlobalEnvelope(
        lower=lower,
        upper=upper,
        alpha=None,
        included=np.nonzero(inside)[0],
        kind="rank-lth",
        sidedness=sidedness,
    )


def envelope_verdict(envelope: GlobalEnvelope, observed) -> EnvelopeVerdict:
    """Graphical test decision for an observed vector.

    The envelope is closed: values on the boundary are inside.  Rejects
    iff the vector is strictly outside at one or more coordinates.
    """
    observed = np.asarray(observed, dtype=np.float64)
    if observed.ndim != 1 or observed.shape[0] != envelope.length:
        raise InvalidInputError("observed vector length does not match the envelope")
    if np.isnan(observed).any():
        raise InvalidInputError("observed vector must not contain nan")
    outside = (observed < envelope.lower) | (observed > envelope.upper)
    coords = np.nonzero(outside)[0]
    return EnvelopeVerdict(reject=coords.size > 0, outside_coordinates=coords)
