import numpy as np
import pytest

from envanova import FunctionalDataset, Sidedness, TestVectorEnsemble

ALL_SIDEDNESS = (
    Sidedness.TWO_SIDED,
    Sidedness.LOWER_EXTREME,
    Sidedness.UPPER_EXTREME,
)


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)


def random_ensemble(rng, s=None, d=None, tied=False):
    """Random test-vector ensemble; ``tied=True`` draws small integers so
    pointwise ties are frequent."""
    if s is None:
        s = int(rng.integers(20, 201))
    if d is None:
        d = int(rng.integers(1, 51))
    if tied:
        values = rng.integers(0, 4, size=(s, d)).astype(float)
    else:
        values = rng.normal(size=(s, d))
    return TestVectorEnsemble(values=values)


def two_group_dataset(rng, n1=5, n2=5, k=8, shift=0.0):
    """Gaussian two-group dataset on a unit grid; group 2 shifted by ``shift``."""
    values = rng.normal(size=(n1 + n2, k))
    values[n1:] += shift
    grid = np.arange(1, k + 1) / k
    groups = np.concatenate([np.ones(n1, dtype=int), np.full(n2, 2)])
    return FunctionalDataset(values=values, grid=grid, groups=groups)


def three_group_dataset(rng, n=4, k=6, spread=(0.0, 0.0, 0.0), scale=(1.0, 1.0, 1.0)):
    values = np.concatenate(
        [rng.normal(mu, sd, size=(n, k)) for mu, sd in zip(spread, scale)]
    )
    grid = np.arange(1, k + 1) / k
    groups = np.repeat([1, 2, 3], n)
    return FunctionalDataset(values=values, grid=grid, groups=groups)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One line per acceptance check at the end of the run."""
    entries = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid and "::" in nodeid:
                name = nodeid.split("::")[-1]
                entries.append((name, "PASSED" if outcome == "passed" else "FAILED"))
    if not entries:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in sorted(set(entries)):
        terminalreporter.write_line(f"{verdict}  {name}")
