"""Synthetic curve groups and Monte Carlo power estimation.

Five mean-curve configurations are provided: a shared hump (null case),
three alternatives with groups that differ in shape or level, and a
ten-group variant of the shape alternative.  Noise is either independent
Gaussian per grid point or a cumulative (Brownian) Gaussian process, in
both cases scaled by a dispersion parameter.

Power is the fraction of simulated datasets a method rejects; every run
draws its own dataset and permutation seeds from one root seed, so
results are bitwise reproducible for any worker thread count.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import beta

from .errors import InvalidInputError
from .fanova import (
    METHODS,
    AnovaConfig,
    FunctionalDataset,
    StatisticKind,
    method_pvalues,
    resolve_thread_count,
)

__all__ = [
    "MODELS",
    "ERRORS",
    "DEFAULT_SIGMAS",
    "ModelSpec",
    "PowerEstimate",
    "PowerCell",
    "generate_dataset",
    "estimate_power",
    "power_table",
]

MODELS = ("M1", "M2", "M3", "M4", "M10")
ERRORS = ("iid", "brownian")
DEFAULT_SIGMAS = (0.05, 0.1, 0.15, 0.2, 0.4, 0.8)


@dataclass(frozen=True)
class ModelSpec:
    """One simulation scenario: mean-curve model, noise type, dispersion.

    Functions are sampled at ``n_points`` evenly spaced grid points of
    (0, 1]; starting just above zero keeps the first cumulative-noise
    increment non-degenerate.  Model M10 has ten groups, the others
    three.
    """

    model: str
    error: str = "iid"
    sigma: float = 0.05
    n_per_group: int = 10
    n_points: int = 100

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidInputError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.error not in ERRORS:
            raise InvalidInputError(f"error must be one of {ERRORS}, got {self.error!r}")
        if not self.sigma > 0:
            raise InvalidInputError("sigma must be positive")
        if self.n_per_group < 2:
            raise InvalidInputError("need at least two functions per group")
        if self.n_points < 1:
            raise InvalidInputError("need at least one grid point")

    @property
    def n_groups(self) -> int:
        return 10 if self.model == "M10" else 3

    @property
    def grid(self) -> np.ndarray:
        return np.arange(1, self.n_points + 1) / self.n_points

    def mean_curves(self) -> np.ndarray:
        """True group mean curves, one row per group."""
        r = self.grid
        if self.model == "M1":
            return np.tile(r * (1.0 - r), (3, 1))
        if self.model == "M2":
            return np.stack([r**g * (1.0 - r) ** (6 - g) for g in (1, 2, 3)])
        if self.model == "M3":
            # exponent indices 2..4: the ten-group variant of this family
            # starts at 2, and index 1 would put nearly all separation on
            # the first couple of grid points
            return np.stack(
                [r ** (g / 5.0) * (1.0 - r) ** (6.0 - g / 5.0) for g in (2, 3, 4)]
            )
        if self.model == "M4":
            return np.stack([np.full(self.n_points, 1.0 + g / 50.0) for g in (1, 2, 3)])
        return np.stack(
            [r ** (g / 5.0) * (1.0 - r) ** (6.0 - g / 5.0) for g in range(2, 12)]
        )


def _noise(spec: ModelSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    if spec.error == "iid":
        return rng.normal(0.0, spec.sigma, size=(n, spec.n_points))
    # cumulative Gaussian noise: increment variance equals the grid step,
    # the first increment starting from zero
    steps = np.diff(spec.grid, prepend=0.0)
    increments = rng.normal(size=(n, spec.n_points)) * np.sqrt(steps)
    return spec.sigma * np.cumsum(increments, axis=1)


def generate_dataset(spec: ModelSpec, rng=None) -> FunctionalDataset:
    """Draw one dataset: ``n_per_group`` noisy curves around each group's
    mean curve.  ``rng`` may be a Generator, a seed, or None."""
    rng = np.random.default_rng(rng)
    j, n = spec.n_groups, spec.n_per_group
    values = np.repeat(spec.mean_curves(), n, axis=0) + _noise(spec, rng, j * n)
    groups = np.repeat(np.arange(1, j + 1), n)
    return FunctionalDataset(values=values, grid=spec.grid, groups=groups)


@dataclass(frozen=True)
class PowerEstimate:
    """Rejection count over Monte Carlo runs with an exact binomial CI."""

    rejections: int
    runs: int

    def __post_init__(self):
        if not 0 <= self.rejections <= self.runs or self.runs < 1:
            raise InvalidInputError("rejections must lie in [0, runs] with runs >= 1")

    @property
    def rate(self) -> float:
        return self.rejections / self.runs

    @property
    def ci95(self) -> tuple[float, float]:
        k, n = self.rejections, self.runs
        low = 0.0 if k == 0 else float(beta.ppf(0.025, k, n - k + 1))
        high = 1.0 if k == n else float(beta.ppf(0.975, k + 1, n - k))
        return (low, high)


@dataclass(frozen=True)
class PowerCell:
    """One power-table entry."""

    model: str
    error: str
    sigma: float
    method: str
    estimate: PowerEstimate


_DEFAULT_METHOD = {
    StatisticKind.MEANS: "GFAM",
    StatisticKind.CONTRASTS: "GFAC",
    StatisticKind.F: "REF",
}


def _cell_rejections(
    spec: ModelSpec,
    cfg: AnovaConfig,
    runs: int,
    methods: tuple[str, ...],
    cell_seed: np.random.SeedSequence,
    n_threads: int,
) -> dict[str, np.ndarray]:
    """Per-run rejection indicators for every method, datasets shared
    across methods within a run."""
    seeds = cell_seed.generate_state(2 * runs, np.uint64)
    flags = np.empty((runs, len(methods)), dtype=bool)

    def one_run(i: int) -> None:
        ds = generate_dataset(spec, np.random.default_rng(int(seeds[2 * i])))
        cfg_run = dataclasses.replace(cfg, seed=int(seeds[2 * i + 1]))
        pvals = method_pvalues(ds, cfg_run, methods, n_threads=1)
        for m, method in enumerate(methods):
            flags[i, m] = pvals[method] <= cfg.alpha

    if n_threads <= 1:
        for i in range(runs):
            one_run(i)
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(one_run, range(runs)))
    return {method: flags[:, m] for m, method in enumerate(methods)}


def estimate_power(
    spec: ModelSpec,
    cfg: AnovaConfig,
    runs: int,
    method: str | None = None,
    *,
    n_threads: int | None = None,
) -> PowerEstimate:
    """Rejection rate of one method over ``runs`` simulated datasets.

    ``method`` defaults to the envelope test matching ``cfg.kind``.  All
    randomness derives from ``cfg.seed``; repeated calls are identical.
    """
    if runs < 1:
        raise InvalidInputError("runs must be >= 1")
    if method is None:
        method = _DEFAULT_METHOD.get(cfg.kind)
        if method is None:
            raise InvalidInputError(
                f"no default method for kind {cfg.kind.value!r}; pass method explicitly"
            )
    if method not in METHODS:
        raise InvalidInputError(f"method must be one of {METHODS}, got {method!r}")
    cell = np.random.SeedSequence(cfg.seed).spawn(1)[0]
    flags = _cell_rejections(
        spec, cfg, runs, (method,), cell, resolve_thread_count(n_threads)
    )[method]
    return PowerEstimate(rejections=int(flags.sum()), runs=runs)


def power_table(
    specs,
    methods,
    sigmas,
    cfg: AnovaConfig,
    runs: int,
    *,
    n_threads: int | None = None,
) -> tuple[PowerCell, ...]:
    """Power of every method over the grid (spec x sigma).

    Within a cell all methods are evaluated on the same datasets with
    the same permutations, so methods are compared run by run.  Cell
    seeds derive from ``cfg.seed`` and the cell's position, making the
    whole table reproducible.
    """
    specs = list(specs)
    methods = tuple(methods)
    sigmas = [float(s) for s in sigmas]
    if runs < 1:
        raise InvalidInputError("runs must be >= 1")
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise InvalidInputError(f"unknown method(s): {', '.join(map(str, unknown))}")
    n_threads = resolve_thread_count(n_threads)
    cells = [(spec, sigma) for spec in specs for sigma in sigmas]
    children = np.random.SeedSequence(cfg.seed).spawn(len(cells))
    out = []
    for (spec, sigma), child in zip(cells, children):
        cell_spec = dataclasses.replace(spec, sigma=sigma)
        flags = _cell_rejections(cell_spec, cfg, runs, methods, child, n_threads)
        for method in methods:
            out.append(
                PowerCell(
                    model=cell_spec.model,
                    error=cell_spec.error,
                    sigma=sigma,
                    method=method,
                    estimate=PowerEstimate(int(flags[method].sum()), runs),
                )
            )
    return tuple(out)
