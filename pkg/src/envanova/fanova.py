"""One-way ANOVA for functional data by permutation and global envelopes.

The test vector of a dataset is, depending on the chosen statistic kind,
the concatenated group mean curves, all pairwise differences of group
mean curves, or a pointwise (possibly variance-corrected) F curve.  A
reference ensemble is built by recomputing the vector under random
permutations of the group labels; ranking the ensemble and thresholding
the extreme rank length measure yields simultaneous p-values and a
graphical envelope.

When group variances differ, curves can be rescaled to a common variance
profile before any permutation happens; permutations are then applied to
the rescaled curves.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .envelope import EnvelopeVerdict, GlobalEnvelope, envelope_verdict, erl_envelope
from .errors import DegenerateVarianceError, InvalidInputError
from .rankcore import (
    PValueTriple,
    Sidedness,
    TestVectorEnsemble,
    compute_erl_measures,
    compute_p_values,
    compute_pointwise_ranks,
)

__all__ = [
    "StatisticKind",
    "FunctionalDataset",
    "AnovaConfig",
    "AnovaResult",
    "CoordinateLabel",
    "METHODS",
    "group_means_vector",
    "group_contrasts_vector",
    "contrast_pairs",
    "moving_average",
    "rescale_functions",
    "scale_summary_functions",
    "f_statistics",
    "welch_f_statistics",
    "permute_group_labels",
    "build_ensemble",
    "run_anova",
    "coordinate_labels",
    "baseline_fmax",
    "baseline_pmin",
    "method_pvalues",
    "resolve_thread_count",
]

THREADS_ENV_VAR = "ENVANOVA_THREADS"

# Rows are always evaluated in fixed-size blocks so that results are
# bitwise identical no matter how many worker threads process them.
_BLOCK_ROWS = 256


class StatisticKind(Enum):
    """Which test vector to build from a dataset."""

    MEANS = "means"
    CONTRASTS = "contrasts"
    MEANS_SCALED = "means-scaled"
    CONTRASTS_SCALED = "contrasts-scaled"
    F = "f"
    F_WELCH = "f-welch"

    @property
    def sidedness(self) -> Sidedness:
        """F curves are extreme upward only; mean-based vectors both ways."""
        if self in (StatisticKind.F, StatisticKind.F_WELCH):
            return Sidedness.UPPER_EXTREME
        return Sidedness.TWO_SIDED

    @property
    def scaled(self) -> bool:
        return self in (StatisticKind.MEANS_SCALED, StatisticKind.CONTRASTS_SCALED)

    @property
    def contrast_based(self) -> bool:
        return self in (StatisticKind.CONTRASTS, StatisticKind.CONTRASTS_SCALED)


@dataclass(frozen=True, eq=False)
class FunctionalDataset:
    """N functions sampled on a common grid, each assigned to one group.

    ``values`` has one row per function, ``groups`` holds integer labels
    1..J with every group nonempty, and ``grid`` is strictly increasing.
    ``group_names`` optionally keeps the original (file) labels in the
    order they were first seen.
    """

    values: np.ndarray
    grid: np.ndarray
    groups: np.ndarray
    group_names: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        grid = np.asarray(self.grid, dtype=np.float64)
        groups = np.asarray(self.groups)
        if values.ndim != 2:
            raise InvalidInputError("values must be a 2-d array (functions x grid points)")
        if not np.isfinite(values).all():
            raise InvalidInputError("function values must be finite")
        n, k = values.shape
        if grid.ndim != 1 or grid.shape[0] != k:
            raise InvalidInputError("grid length must match the number of value columns")
        if not np.isfinite(grid).all() or np.any(np.diff(grid) <= 0):
            raise InvalidInputError("grid must be finite and strictly increasing")
        if groups.ndim != 1 or groups.shape[0] != n:
            raise InvalidInputError("one group label per function is required")
        if not np.issubdtype(groups.dtype, np.integer):
            raise InvalidInputError("group labels must be integers 1..J")
        groups = groups.astype(np.int64)
        present = np.unique(groups)
        j = present.shape[0]
        if j < 2 or not np.array_equal(present, np.arange(1, j + 1)):
            raise InvalidInputError("group labels must cover 1..J with J >= 2, every group nonempty")
        if self.group_names is not None and len(self.group_names) != j:
            raise InvalidInputError("group_names must have one entry per group")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "groups", groups)

    @property
    def n_functions(self) -> int:
        return self.values.shape[0]

    @property
    def n_points(self) -> int:
        return self.values.shape[1]

    @property
    def n_groups(self) -> int:
        return int(self.groups.max())

    @property
    def group_sizes(self) -> np.ndarray:
        return np.bincount(self.groups, minlength=self.n_groups + 1)[1:]

    def group_values(self, label: int) -> np.ndarray:
        return self.values[self.groups == label]


@dataclass(frozen=True)
class AnovaConfig:
    """Reproducible test configuration.

    ``nperm`` is the number of simulated label permutations, so the
    ensemble holds ``nperm + 1`` vectors.  With ``exhaustive=True`` all
    N! label permutations are enumerated instead (the identity first,
    standing in for the observed row); refused above ``exhaustive_cap``.
    """

    kind: StatisticKind
    seed: int
    nperm: int = 1999
    alpha: float = 0.05
    ma_window: int = 1
    exhaustive: bool = False
    exhaustive_cap: int = 40320

    def __post_init__(self):
        kind = self.kind
        if isinstance(kind, str):
            try:
                kind = StatisticKind(kind)
            except ValueError:
                raise InvalidInputError(f"unknown statistic kind: {self.kind!r}") from None
            object.__setattr__(self, "kind", kind)
        elif not isinstance(kind, StatisticKind):
            raise InvalidInputError(f"unknown statistic kind: {kind!r}")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise InvalidInputError("seed must be a non-negative integer")
        object.__setattr__(self, "seed", int(self.seed))
        if not isinstance(self.nperm, (int, np.integer)) or self.nperm < 1:
            raise InvalidInputError("nperm must be a positive integer")
        object.__setattr__(self, "nperm", int(self.nperm))
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not isinstance(self.ma_window, (int, np.integer)) or self.ma_window < 1 or self.ma_window % 2 == 0:
            raise InvalidInputError("ma_window must be an odd positive integer")
        object.__setattr__(self, "ma_window", int(self.ma_window))


@dataclass(frozen=True)
class CoordinateLabel:
    """Meaning of one test-vector coordinate: the grid point ``r`` plus
    either the group (mean vectors) or the ordered group pair
    (contrast vectors); both None for F vectors."""

    r: float
    group: int | None = None
    pair: tuple[int, int] | None = None


@dataclass(frozen=True, eq=False)
class AnovaResult:
    """Everything run_anova produces for one dataset."""

    config: AnovaConfig
    pvalues: PValueTriple
    envelope: GlobalEnvelope
    verdict: EnvelopeVerdict
    observed: np.ndarray
    coordinate_labels: tuple[CoordinateLabel, ...]
    warnings: tuple[str, ...] = ()


def resolve_thread_count(n_threads: int | None = None) -> int:
    """Worker threads to use: explicit argument, else the ENVANOVA_THREADS
    environment variable, else 1.  Advisory only; results never depend
    on it."""
    if n_threads is None:
        raw = os.environ.get(THREADS_ENV_VAR, "1")
        try:
            n_threads = int(raw)
        except ValueError:
            raise InvalidInputError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from None
    if n_threads < 1:
        raise InvalidInputError("thread count must be >= 1")
    return int(n_threads)


def contrast_pairs(n_groups: int) -> list[tuple[int, int]]:
    """Ordered group pairs (1,2), (1,3), ..., (J-1,J)."""
    return list(itertools.combinations(range(1, n_groups + 1), 2))


def _group_mean_curves(ds: FunctionalDataset) -> np.ndarray:
    return np.stack([ds.group_values(j).mean(axis=0) for j in range(1, ds.n_groups + 1)])


def group_means_vector(ds: FunctionalDataset) -> np.ndarray:
    """Group mean curves concatenated in label order; length J*K."""
    return _group_mean_curves(ds).ravel()


def group_contrasts_vector(ds: FunctionalDataset) -> np.ndarray:
    """All pairwise differences of group mean curves, first minus second,
    pairs ordered (1,2), (1,3), ..., (J-1,J); length J(J-1)/2 * K."""
    means = _group_mean_curves(ds)
    blocks = [means[a - 1] - means[b - 1] for a, b in contrast_pairs(ds.n_groups)]
    return np.concatenate(blocks)


def moving_average(series, window: int) -> np.ndarray:
    """Centered moving average along the last axis, window truncated at
    the boundaries.  ``window`` must be odd; 1 means no smoothing."""
    x = np.asarray(series, dtype=np.float64)
    if not isinstance(window, (int, np.integer)) or window < 1 or window % 2 == 0:
        raise InvalidInputError(f"window must be an odd positive integer, got {window!r}")
    if window == 1:
        return x.copy()
    half = (window - 1) // 2
    k = x.shape[-1]
    padded = np.concatenate([np.zeros(x.shape[:-1] + (1,)), np.cumsum(x, axis=-1)], axis=-1)
    lo = np.maximum(np.arange(k) - half, 0)
    hi = np.minimum(np.arange(k) + half, k - 1) + 1
    return (padded[..., hi] - padded[..., lo]) / (hi - lo)


def _require_group_sizes(ds: FunctionalDataset, minimum: int) -> None:
    sizes = ds.group_sizes
    small = np.nonzero(sizes < minimum)[0]
    if small.size:
        raise InvalidInputError(
            f"group {small[0] + 1} has {sizes[small[0]]} function(s); need at least {minimum}"
        )


def rescale_functions(ds: FunctionalDataset, window: int = 1) -> FunctionalDataset:
    """Rescale every curve so all groups share the overall variance profile.

    At each grid point a curve is centered at the grand mean curve,
    divided by the (optionally moving-average smoothed) standard
    deviation of its own group, multiplied by the smoothed overall
    standard deviation, and shifted back.  Group variances must be
    positive everywhere after smoothing.
    """
    _require_group_sizes(ds, 2)
    values = ds.values
    overall_mean = values.mean(axis=0)
    smooth_overall = moving_average(values.var(axis=0, ddof=1), window)
    out = np.empty_like(values)
    for j in range(1, ds.n_groups + 1):
        members = ds.groups == j
        sub = values[members]
        smooth_j = moving_average(sub.var(axis=0, ddof=1), window)
        dead = np.nonzero(smooth_j <= 0.0)[0]
        if dead.size:
            raise DegenerateVarianceError(j, float(ds.grid[dead[0]]))
        out[members] = (sub - overall_mean) / np.sqrt(smooth_j) * np.sqrt(smooth_overall) + overall_mean
    return dataclasses.replace(ds, values=out)


def scale_summary_functions(fns, counts) -> np.ndarray:
    """Rescale summary functions whose variance is proportional to the
    reciprocal of a per-function count.

    Each function is centered at the pointwise mean, divided by
    ``sqrt(1 / count)``, multiplied by the average of those factors, and
    shifted back, which equalizes the variances without changing the
    mean function.
    """
    fns = np.asarray(fns, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    if fns.ndim != 2:
        raise InvalidInputError("summary functions must form a 2-d array")
    if counts.ndim != 1 or counts.shape[0] != fns.shape[0]:
        raise InvalidInputError("one count per summary function is required")
    if np.any(counts <= 0) or not np.isfinite(counts).all():
        raise InvalidInputError("counts must be positive and finite")
    mean_fn = fns.mean(axis=0)
    factors = np.sqrt(1.0 / counts)
    return (fns - mean_fn) / factors[:, None] * factors.mean() + mean_fn


def f_statistics(ds: FunctionalDataset) -> np.ndarray:
    """Classic one-way ANOVA F statistic at every grid point.

    Degenerate denominators follow 0/0 -> 0 and positive/0 -> +inf; a
    grid column constant across all functions yields 0.
    """
    _require_group_sizes(ds, 2)
    if ds.n_functions <= ds.n_groups:
        raise InvalidInputError("need more functions than groups")
    values = ds.values
    n, j = ds.n_functions, ds.n_groups
    grand = values.mean(axis=0)
    ssb = np.zeros(ds.n_points)
    ssw = np.zeros(ds.n_points)
    for g in range(1, j + 1):
        sub = values[ds.groups == g]
        mean_g = sub.mean(axis=0)
        ssb += sub.shape[0] * (mean_g - grand) ** 2
        ssw += ((sub - mean_g) ** 2).sum(axis=0)
    return _f_from_sums(ssb / (j - 1), ssw / (n - j), np.ptp(values, axis=0) == 0)


def _f_from_sums(num: np.ndarray, den: np.ndarray, constant_cols: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        f = num / den
    f = np.where((den == 0) & (num > 0), np.inf, f)
    f = np.where((den == 0) & (num == 0), 0.0, f)
    f[..., constant_cols] = 0.0
    return f


def welch_f_statistics(ds: FunctionalDataset) -> np.ndarray:
    """Variance-corrected (Welch) one-way F statistic at every grid point.

    Groups are weighted by size over variance, so unequal group
    variances do not distort the null distribution.  With two groups
    this is the squared Welch t statistic.  Every group needs positive
    variance at every grid point.
    """
    _require_group_sizes(ds, 2)
    values = ds.values
    j = ds.n_groups
    means, weights, sizes = [], [], []
    for g in range(1, j + 1):
        sub = values[ds.groups == g]
        dead = np.nonzero(np.ptp(sub, axis=0) == 0)[0]
        if dead.size:
            raise DegenerateVarianceError(g, float(ds.grid[dead[0]]))
        means.append(sub.mean(axis=0))
        weights.append(sub.shape[0] / sub.var(axis=0, ddof=1))
        sizes.append(sub.shape[0])
    return _welch_from_moments(means, weights, sizes, j)


def _welch_from_moments(means, weights, sizes, j) -> np.ndarray:
    weight_sum = sum(weights)
    center = sum(w * m for w, m in zip(weights, means)) / weight_sum
    num = sum(w * (m - center) ** 2 for w, m in zip(weights, means)) / (j - 1)
    spread = sum(
        (1.0 - w / weight_sum) ** 2 / (n - 1) for w, n in zip(weights, sizes)
    )
    den = 1.0 + 2.0 * (j - 2) / (j * j - 1.0) * spread
    return num / den


def permute_group_labels(groups, rng: np.random.Generator) -> np.ndarray:
    """One uniformly random permutation of the label vector."""
    return rng.permutation(np.asarray(groups))


def _permutation_labels(groups: np.ndarray, cfg: AnovaConfig) -> np.ndarray:
    """Label matrix, one row per ensemble vector; row 0 is the observed
    labelling (the identity permutation in the exhaustive case)."""
    n = groups.shape[0]
    if cfg.exhaustive:
        total = math.factorial(n)
        if total > cfg.exhaustive_cap:
            raise InvalidInputError(
                f"exhaustive enumeration of {n}! = {total} permutations exceeds the cap "
                f"({cfg.exhaustive_cap}); raise exhaustive_cap or sample instead"
            )
        index_rows = np.fromiter(
            itertools.chain.from_iterable(itertools.permutations(range(n))),
            dtype=np.intp,
            count=total * n,
        ).reshape(total, n)
        return groups[index_rows]
    labels = np.empty((cfg.nperm + 1, n), dtype=np.int64)
    labels[0] = groups
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.nperm)
    for i, child in enumerate(children):
        labels[i + 1] = permute_group_labels(groups, np.random.default_rng(child))
    return labels


class _StatContext:
    """Label-independent precomputation for blocked row evaluation."""

    def __init__(self, ds: FunctionalDataset, kind: StatisticKind):
        self.kind = kind
        self.values = ds.values
        self.grid = ds.grid
        self.n_groups = ds.n_groups
        self.n_points = ds.n_points
        self.sizes = ds.group_sizes.astype(np.float64)
        self.pairs = contrast_pairs(ds.n_groups)
        if kind in (StatisticKind.F, StatisticKind.F_WELCH):
            _require_group_sizes(ds, 2)
            if ds.n_functions <= ds.n_groups:
                raise InvalidInputError("need more functions than groups")
            # center once: the grand mean is permutation-invariant and
            # centering keeps the one-pass variance sums well conditioned
            self.centered = self.values - self.values.mean(axis=0)
            self.centered_sq = self.centered * self.centered
            self.grand = self.centered.mean(axis=0)
            self.constant_cols = np.ptp(self.values, axis=0) == 0
            if kind is StatisticKind.F_WELCH and self.constant_cols.any():
                k = int(np.nonzero(self.constant_cols)[0][0])
                raise DegenerateVarianceError(
                    1, float(self.grid[k]), "column constant across all functions"
                )

    @property
    def out_length(self) -> int:
        if self.kind in (StatisticKind.F, StatisticKind.F_WELCH):
            return self.n_points
        if self.kind.contrast_based:
            return len(self.pairs) * self.n_points
        return self.n_groups * self.n_points

    def rows(self, labels_block: np.ndarray) -> np.ndarray:
        if self.kind in (StatisticKind.F, StatisticKind.F_WELCH):
            return self._f_rows(labels_block)
        means = self._mean_rows(labels_block)
        if self.kind.contrast_based:
            blocks = [means[a - 1] - means[b - 1] for a, b in self.pairs]
        else:
            blocks = list(means)
        return np.concatenate(blocks, axis=1)

    def _mean_rows(self, labels_block: np.ndarray) -> list[np.ndarray]:
        out = []
        for g in range(1, self.n_groups + 1):
            mask = (labels_block == g).astype(np.float64)
            out.append((mask @ self.values) / self.sizes[g - 1])
        return out

    def _f_rows(self, labels_block: np.ndarray) -> np.ndarray:
        j = self.n_groups
        n_total = self.values.shape[0]
        ssb = 0.0
        ssw = 0.0
        group_means, group_weights = [], []
        for g in range(1, j + 1):
            n_g = self.sizes[g - 1]
            mask = (labels_block == g).astype(np.float64)
            s1 = mask @ self.centered
            s2 = mask @ self.centered_sq
            mean_g = s1 / n_g
            within = s2 - s1 * mean_g
            if self.kind is StatisticKind.F_WELCH:
                var_g = within / (n_g - 1.0)
                bad = np.argwhere(var_g <= 0.0)
                if bad.size:
                    raise DegenerateVarianceError(g, float(self.grid[bad[0][1]]))
                group_means.append(mean_g)
                group_weights.append(n_g / var_g)
            else:
                ssw = ssw + within
                diff = mean_g - self.grand
                ssb = ssb + n_g * diff * diff
        if self.kind is StatisticKind.F_WELCH:
            return _welch_from_moments(
                group_means, group_weights, [int(n) for n in self.sizes], j
            )
        ssw = np.maximum(ssw, 0.0)  # guard cancellation in near-degenerate columns
        num = ssb / (j - 1)
        den = ssw / (n_total - j)
        return _f_from_sums(num, den, self.constant_cols)


def _evaluate_rows(ctx: _StatContext, labels: np.ndarray, n_threads: int) -> np.ndarray:
    s = labels.shape[0]
    out = np.empty((s, ctx.out_length))
    blocks = [slice(start, min(start + _BLOCK_ROWS, s)) for start in range(0, s, _BLOCK_ROWS)]

    def run(block: slice) -> None:
        out[block] = ctx.rows(labels[block])

    if n_threads <= 1 or len(blocks) == 1:
        for block in blocks:
            run(block)
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(run, blocks))
    return out


def build_ensemble(
    ds: FunctionalDataset, cfg: AnovaConfig, *, n_threads: int | None = None
) -> TestVectorEnsemble:
    """Observed test vector plus its permutation reference ensemble.

    For the scaled kinds the curves are rescaled once, using the
    observed groups, and all permutations act on the rescaled curves.
    Row i > 0 is the statistic of the i-th permuted labelling; row 0 is
    the observed statistic computed through the same code path.
    """
    base = rescale_functions(ds, cfg.ma_window) if cfg.kind.scaled else ds
    labels = _permutation_labels(ds.groups, cfg)
    ctx = _StatContext(base, cfg.kind)
    rows = _evaluate_rows(ctx, labels, resolve_thread_count(n_threads))
    return TestVectorEnsemble(rows)


def coordinate_labels(ds: FunctionalDataset, kind: StatisticKind) -> tuple[CoordinateLabel, ...]:
    """Label every test-vector coordinate with its grid point and group
    or group pair, in the exact concatenation order of the vector."""
    grid = [float(r) for r in ds.grid]
    if kind in (StatisticKind.F, StatisticKind.F_WELCH):
        return tuple(CoordinateLabel(r=r) for r in grid)
    if kind.contrast_based:
        return tuple(
            CoordinateLabel(r=r, pair=(a, b))
            for a, b in contrast_pairs(ds.n_groups)
            for r in grid
        )
    return tuple(
        CoordinateLabel(r=r, group=g) for g in range(1, ds.n_groups + 1) for r in grid
    )


def run_anova(
    ds: FunctionalDataset, cfg: AnovaConfig, *, n_threads: int | None = None
) -> AnovaResult:
    """Permutation test of equal group mean curves with a global envelope.

    The verdict is graphical: reject iff the observed vector leaves the
    extreme rank length envelope anywhere.  For tie-free ensembles that
    is exactly ``p_erl <= alpha``.
    """
    ensemble = build_ensemble(ds, cfg, n_threads=n_threads)
    sidedness = cfg.kind.sidedness
    ranks = compute_pointwise_ranks(ensemble, sidedness)
    erl = compute_erl_measures(ranks)
    pvalues = compute_p_values(ranks, erl)
    notes = []
    if cfg.alpha * ensemble.n_vectors < 1.0:
        notes.append(
            f"alpha * s = {cfg.alpha * ensemble.n_vectors:.3g} < 1: the test cannot "
            "reject at this level; increase nperm"
        )
    env = erl_envelope(ensemble, erl, cfg.alpha, sidedness)
    verdict = envelope_verdict(env, ensemble.observed)
    return AnovaResult(
        config=cfg,
        pvalues=pvalues,
        envelope=env,
        verdict=verdict,
        observed=ensemble.observed,
        coordinate_labels=coordinate_labels(ds, cfg.kind),
        warnings=tuple(notes),
    )


def baseline_fmax(
    ds: FunctionalDataset, cfg: AnovaConfig, *, n_threads: int | None = None
) -> float:
    """Monte Carlo p-value of the maximum pointwise F statistic.

    The observed maximum is compared against the permutation reference
    set with the observed row included, so the p-value is at least 1/s.
    """
    cfg_f = dataclasses.replace(cfg, kind=StatisticKind.F)
    ensemble = build_ensemble(ds, cfg_f, n_threads=n_threads)
    maxima = ensemble.values.max(axis=1)
    return int(np.count_nonzero(maxima >= maxima[0])) / ensemble.n_vectors


def baseline_pmin(result: AnovaResult) -> float:
    """p-value of the minimum-pointwise-p permutation procedure.

    Identical to the conservative bound of the F-curve envelope test, so
    it is read off an existing F-kind result rather than recomputed.
    """
    if result.config.kind not in (StatisticKind.F, StatisticKind.F_WELCH):
        raise InvalidInputError("baseline_pmin needs a result of an F-statistic run")
    return result.pvalues.p_plus


METHODS = ("GFAM", "GFAC", "REF", "F-max", "p-min")

_METHOD_KIND = {
    "GFAM": StatisticKind.MEANS,
    "GFAC": StatisticKind.CONTRASTS,
    "REF": StatisticKind.F,
    "F-max": StatisticKind.F,
    "p-min": StatisticKind.F,
}


def method_pvalues(
    ds: FunctionalDataset,
    cfg: AnovaConfig,
    methods,
    *,
    n_threads: int | None = None,
) -> dict[str, float]:
    """p-value of each requested method, sharing permutations and
    ensembles across methods.

    GFAM and GFAC use the extreme rank length p of the group-means and
    group-contrasts vectors, REF that of the pointwise F curve; p-min is
    the conservative bound of the same F run and F-max the Monte Carlo p
    of the maximum F.  All methods see the same label permutations
    (drawn from ``cfg.seed``), so per-run comparisons are paired.
    """
    methods = list(methods)
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise InvalidInputError(f"unknown method(s): {', '.join(map(str, unknown))}")
    n_threads = resolve_thread_count(n_threads)
    labels = _permutation_labels(ds.groups, cfg)
    out: dict[str, float] = {}

    def erl_p(ensemble_rows: np.ndarray, sidedness: Sidedness) -> PValueTriple:
        ensemble = TestVectorEnsemble(ensemble_rows)
        ranks = compute_pointwise_ranks(ensemble, sidedness)
        return compute_p_values(ranks, compute_erl_measures(ranks))

    mean_rows = None
    if "GFAM" in methods or "GFAC" in methods:
        ctx = _StatContext(ds, StatisticKind.MEANS)
        mean_rows = _evaluate_rows(ctx, labels, n_threads)
    if "GFAM" in methods:
        out["GFAM"] = erl_p(mean_rows, Sidedness.TWO_SIDED).p_erl
    if "GFAC" in methods:
        j, k = ds.n_groups, ds.n_points
        stacked = mean_rows.reshape(-1, j, k)
        contrast_rows = np.concatenate(
            [stacked[:, a - 1] - stacked[:, b - 1] for a, b in contrast_pairs(j)], axis=1
        )
        out["GFAC"] = erl_p(contrast_rows, Sidedness.TWO_SIDED).p_erl
    if any(m in methods for m in ("REF", "F-max", "p-min")):
        ctx = _StatContext(ds, StatisticKind.F)
        f_rows = _evaluate_rows(ctx, labels, n_threads)
        if "REF" in methods or "p-min" in methods:
            triple = erl_p(f_rows, Sidedness.UPPER_EXTREME)
            if "REF" in methods:
                out["REF"] = triple.p_erl
            if "p-min" in methods:
                out["p-min"] = triple.p_plus
        if "F-max" in methods:
            maxima = f_rows.max(axis=1)
            out["F-max"] = int(np.count_nonzero(maxima >= maxima[0])) / f_rows.shape[0]
    return out
