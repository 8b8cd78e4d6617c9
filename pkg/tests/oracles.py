"""Brute-force reference implementations used to cross-check the package.

Everything here is deliberately written in plain Python (lists, tuples,
fractions) with no numpy and no imports from the package under test, so
that agreement between the two is meaningful.  Exact rational arithmetic
sidesteps any float-rounding questions in the rank machinery.
"""

from fractions import Fraction
import math
import statistics


def pointwise_ranks(values, sidedness):
    """Tie-averaged pointwise ranks of an s x d table of floats.

    ``sidedness`` is one of "lower", "upper", "two"; raw rank 1 belongs to
    the smallest value in the column.  Returns Fractions.
    """
    s = len(values)
    d = len(values[0])
    raw = [[None] * d for _ in range(s)]
    for k in range(d):
        column = [values[i][k] for i in range(s)]
        order = sorted(range(s), key=lambda i: column[i])
        i = 0
        while i < s:
            j = i
            while j + 1 < s and column[order[j + 1]] == column[order[i]]:
                j += 1
            shared = Fraction((i + 1) + (j + 1), 2)
            for t in range(i, j + 1):
                raw[order[t]][k] = shared
            i = j + 1
    out = []
    for i in range(s):
        row = []
        for k in range(d):
            r = raw[i][k]
            if sidedness == "lower":
                row.append(r)
            elif sidedness == "upper":
                row.append(s + 1 - r)
            else:
                row.append(min(r, s + 1 - r))
        out.append(row)
    return out


def erl_reference(values, sidedness):
    """Full rank/ERL/p-value computation by definition.

    Returns a dict with Fractions: per-row extreme ranks, precede counts,
    measures, and the three p-values.
    """
    ranks = pointwise_ranks(values, sidedness)
    s = len(ranks)
    sorted_rows = [tuple(sorted(row)) for row in ranks]
    counts = [
        sum(1 for other in sorted_rows if other < mine) for mine in sorted_rows
    ]
    extreme = [min(row) for row in ranks]
    return {
        "ranks": ranks,
        "extreme": extreme,
        "counts": counts,
        "measures": [Fraction(c, s) for c in counts],
        "p_plus": Fraction(sum(1 for e in extreme if e <= extreme[0]), s),
        "p_minus": Fraction(sum(1 for e in extreme if e < extreme[0]), s),
        "p_erl": Fraction(sum(1 for c in counts if c <= counts[0]), s),
    }


def classic_f_scalar(groups):
    """One-way ANOVA F for scalar samples, one list per group."""
    sizes = [len(g) for g in groups]
    total = sum(sizes)
    grand = sum(sum(g) for g in groups) / total
    between = sum(n * (statistics.fmean(g) - grand) ** 2 for n, g in zip(sizes, groups))
    within = sum(sum((x - statistics.fmean(g)) ** 2 for x in g) for g in groups)
    j = len(groups)
    num = between / (j - 1)
    den = within / (total - j)
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den


def welch_f_scalar(groups):
    """Welch's heteroscedastic one-way statistic for scalar samples."""
    j = len(groups)
    sizes = [len(g) for g in groups]
    means = [statistics.fmean(g) for g in groups]
    variances = [statistics.variance(g) for g in groups]
    weights = [n / v for n, v in zip(sizes, variances)]
    wsum = sum(weights)
    pooled = sum(w * m for w, m in zip(weights, means)) / wsum
    num = sum(w * (m - pooled) ** 2 for w, m in zip(weights, means)) / (j - 1)
    irregular = sum(
        (1 - w / wsum) ** 2 / (n - 1) for w, n in zip(weights, sizes)
    )
    den = 1 + 2 * (j - 2) / (j**2 - 1) * irregular
    return num / den


def rescale_scalar(groups, point_values):
    """Variance rescaling of a single grid column, no smoothing.

    ``groups`` maps each observation index to its group label and
    ``point_values`` holds the column; both plain lists.  Returns the
    rescaled column.
    """
    labels = sorted(set(groups))
    overall_mean = statistics.fmean(point_values)
    overall_var = statistics.variance(point_values)
    out = [None] * len(point_values)
    for lab in labels:
        sub = [v for v, g in zip(point_values, groups) if g == lab]
        gvar = statistics.variance(sub)
        for i, (v, g) in enumerate(zip(point_values, groups)):
            if g == lab:
                out[i] = (v - overall_mean) / math.sqrt(gvar) * math.sqrt(
                    overall_var
                ) + overall_mean
    return out


def scale_by_counts_scalar(fns, counts):
    """Count-based scaling of scalar summaries, one value per unit."""
    n = len(fns)
    mean = statistics.fmean(fns)
    factors = [math.sqrt(1.0 / m) for m in counts]
    tau = sum(factors) / n
    return [(f - mean) / fac * tau + mean for f, fac in zip(fns, factors)]
