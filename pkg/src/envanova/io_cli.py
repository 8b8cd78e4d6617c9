"""Dataset files, result documents, figures, and the command line.

Datasets travel as wide CSV: a header row ``group,r1,...,rK`` with a
strictly increasing grid, then one row per function holding its label
and K values.  Labels may be arbitrary strings; they are normalized to
1..J in order of first appearance and kept for display.

Results are emitted as a JSON document that echoes the configuration,
carries the p-value triple, the envelope (infinities as nulls), the
observed vector with coordinate labels, and the verdict.  Output bytes
are deterministic for a fixed seed, including SVG figures.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import secrets
import sys

import numpy as np

from . import __version__
from .errors import DegenerateVarianceError, InvalidInputError, ParseError
from .fanova import (
    AnovaConfig,
    AnovaResult,
    FunctionalDataset,
    StatisticKind,
    run_anova,
    scale_summary_functions,
)
from .simulate import DEFAULT_SIGMAS, ERRORS, MODELS, ModelSpec, PowerCell, power_table
from .fanova import METHODS

__all__ = [
    "load_dataset",
    "write_dataset",
    "load_weights",
    "result_document",
    "document_json",
    "write_document",
    "load_document",
    "document_bounds",
    "power_csv",
    "write_power_csv",
    "emit_envelope_figure",
    "main",
]


def load_dataset(path) -> FunctionalDataset:
    """Read a wide-CSV dataset; errors carry 1-based row/column positions."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    if not rows:
        raise ParseError("empty dataset file", row=1)
    header = rows[0]
    if header[0].strip().lower() != "group":
        raise ParseError(
            f"first header cell must be 'group', got {header[0]!r}", row=1, column=1
        )
    if len(header) < 2:
        raise ParseError("header defines no grid points", row=1)
    grid = np.empty(len(header) - 1)
    for c, cell in enumerate(header[1:], start=2):
        try:
            grid[c - 2] = float(cell)
        except ValueError:
            raise ParseError(f"grid value {cell!r} is not numeric", row=1, column=c) from None
    bad = np.nonzero(np.diff(grid) <= 0)[0]
    if bad.size:
        raise ParseError("grid must be strictly increasing", row=1, column=int(bad[0]) + 3)
    if len(rows) < 3:
        raise ParseError("need at least two function rows", row=len(rows))
    names: list[str] = []
    labels = []
    values = np.empty((len(rows) - 1, grid.shape[0]))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} cells, found {len(row)}", row=r
            )
        name = row[0].strip()
        if not name:
            raise ParseError("empty group label", row=r, column=1)
        if name not in names:
            names.append(name)
        labels.append(names.index(name) + 1)
        for c, cell in enumerate(row[1:], start=2):
            try:
                values[r - 2, c - 2] = float(cell)
            except ValueError:
                raise ParseError(
                    f"value {cell!r} is not numeric", row=r, column=c
                ) from None
    if len(names) < 2:
        raise ParseError("need at least two distinct groups", row=len(rows))
    return FunctionalDataset(
        values=values,
        grid=grid,
        groups=np.asarray(labels, dtype=np.int64),
        group_names=tuple(names),
    )


def write_dataset(ds: FunctionalDataset, path) -> None:
    """Write a dataset in the wide-CSV form load_dataset reads back
    losslessly (floats via repr)."""
    names = ds.group_names or tuple(str(j) for j in range(1, ds.n_groups + 1))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", *(repr(float(r)) for r in ds.grid)])
        for i in range(ds.n_functions):
            writer.writerow(
                [names[ds.groups[i] - 1], *(repr(float(v)) for v in ds.values[i])]
            )


def load_weights(path, expected: int) -> np.ndarray:
    """Read per-function counts: one positive number per line."""
    weights = []
    with open(path, encoding="utf-8") as fh:
        for r, line in enumerate(fh, start=1):
            token = line.strip().rstrip(",")
            if not token:
                continue
            try:
                weights.append(float(token))
            except ValueError:
                raise ParseError(f"weight {token!r} is not numeric", row=r) from None
    if len(weights) != expected:
        raise ParseError(
            f"expected {expected} weights (one per function), found {len(weights)}"
        )
    out = np.asarray(weights)
    if np.any(out <= 0):
        raise ParseError("weights must be positive")
    return out


def _null_non_finite(vector, sign: float) -> list:
    out = []
    for v in vector:
        v = float(v)
        out.append(v if np.isfinite(v) else None)
        if not np.isfinite(v) and np.sign(v) != sign:
            raise InvalidInputError("envelope bound has the wrong infinite sign")
    return out


def result_document(result: AnovaResult, ds: FunctionalDataset) -> dict:
    """JSON-ready description of one test run.

    Envelope infinities become nulls (lower null means unbounded below,
    upper null unbounded above); the reject flag is taken from the
    verdict, which for tie-free ensembles equals ``p_erl <= alpha``.
    """
    cfg = result.config
    labels = []
    for lab in result.coordinate_labels:
        entry: dict = {"r": lab.r}
        if lab.group is not None:
            entry["group"] = lab.group
        if lab.pair is not None:
            entry["pair"] = list(lab.pair)
        labels.append(entry)
    return {
        "tool": "envanova",
        "version": __version__,
        "config": {
            "kind": cfg.kind.value,
            "alpha": cfg.alpha,
            "nperm": cfg.nperm,
            "seed": cfg.seed,
            "ma_window": cfg.ma_window,
            "exhaustive": cfg.exhaustive,
        },
        "dataset": {
            "n_functions": ds.n_functions,
            "n_groups": ds.n_groups,
            "n_points": ds.n_points,
            "group_names": list(ds.group_names) if ds.group_names else None,
        },
        "p_minus": result.pvalues.p_minus,
        "p_erl": result.pvalues.p_erl,
        "p_plus": result.pvalues.p_plus,
        "reject": bool(result.verdict.reject),
        "warnings": list(result.warnings),
        "envelope": {
            "kind": result.envelope.kind,
            "sidedness": result.envelope.sidedness.value,
            "alpha": result.envelope.alpha,
            "lower": _null_non_finite(result.envelope.lower, -1.0),
            "upper": _null_non_finite(result.envelope.upper, 1.0),
        },
        "observed": [float(v) for v in result.observed],
        "outside_coordinates": [int(k) for k in result.verdict.outside_coordinates],
        "coordinate_labels": labels,
    }


def document_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_document(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(document_json(doc))


def load_document(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def document_bounds(doc: dict) -> tuple[np.ndarray, np.ndarray]:
    """Envelope bounds of a document as arrays, nulls restored to
    -inf (lower) and +inf (upper)."""
    lower = np.array(
        [-np.inf if v is None else v for v in doc["envelope"]["lower"]], dtype=float
    )
    upper = np.array(
        [np.inf if v is None else v for v in doc["envelope"]["upper"]], dtype=float
    )
    return lower, upper


def power_csv(cells) -> str:
    """Render power-table cells as CSV text."""
    lines = ["model,error,sigma,method,rejections,runs,rate,ci_low,ci_high"]
    for cell in cells:
        est = cell.estimate
        low, high = est.ci95
        lines.append(
            ",".join(
                [
                    cell.model,
                    cell.error,
                    repr(float(cell.sigma)),
                    cell.method,
                    str(est.rejections),
                    str(est.runs),
                    repr(est.rate),
                    repr(low),
                    repr(high),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_power_csv(cells, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(power_csv(cells))


def _figure_panels(doc: dict) -> list[tuple[str, list[int]]]:
    labels = doc["coordinate_labels"]
    names = doc["dataset"].get("group_names")

    def group_name(g: int) -> str:
        return names[g - 1] if names else str(g)

    panels: dict = {}
    for idx, lab in enumerate(labels):
        if "group" in lab:
            key = ("group", lab["group"])
            title = f"group {group_name(lab['group'])}"
        elif "pair" in lab:
            a, b = lab["pair"]
            key = ("pair", a, b)
            title = f"group {group_name(a)} - group {group_name(b)}"
        else:
            key = ("f",)
            title = "pointwise F"
        panels.setdefault(key, (title, []))[1].append(idx)
    return list(panels.values())


def emit_envelope_figure(doc: dict, path) -> None:
    """Draw the envelope and observed curve, one panel per group, per
    group pair, or a single panel for F curves.  SVG output is
    byte-deterministic for a fixed document."""
    import matplotlib

    matplotlib.rcParams["svg.hashsalt"] = "envanova"
    matplotlib.rcParams["svg.fonttype"] = "none"
    from matplotlib.figure import Figure

    lower, upper = document_bounds(doc)
    observed = np.asarray(doc["observed"], dtype=float)
    outside = set(doc["outside_coordinates"])
    rs = np.asarray([lab["r"] for lab in doc["coordinate_labels"]], dtype=float)

    panels = _figure_panels(doc)
    ncols = min(3, len(panels))
    nrows = -(-len(panels) // ncols)
    fig = Figure(figsize=(4.2 * ncols, 3.2 * nrows))
    axes = fig.subplots(nrows, ncols, squeeze=False)
    for ax in axes.ravel()[len(panels):]:
        ax.set_visible(False)
    for ax, (title, idx) in zip(axes.ravel(), panels):
        idx = np.asarray(idx)
        x = rs[idx]
        lo = lower[idx]
        up = upper[idx]
        # one-sided bands rest on the axis floor / ceiling of the data
        lo = np.where(np.isneginf(lo), 0.0, lo)
        finite_top = np.max(observed[idx][np.isfinite(observed[idx])], initial=0.0)
        up_plot = np.where(np.isposinf(up), finite_top, up)
        ax.fill_between(x, lo, up_plot, color="0.85", label="envelope")
        ax.plot(x, observed[idx], color="C0", lw=1.2, label="observed")
        marked = [k for k, i in enumerate(idx) if int(i) in outside]
        if marked:
            ax.plot(x[marked], observed[idx][marked], "r.", ms=5, label="outside")
        ax.set_title(title, fontsize=10)
        ax.set_xlabel("r")
    handles, labels_ = axes.ravel()[0].get_legend_handles_labels()
    fig.legend(handles, labels_, loc="lower right", fontsize=8)
    fig.suptitle(
        f"p_erl = {doc['p_erl']:.4g}  "
        f"({'reject' if doc['reject'] else 'no rejection'} at alpha = {doc['config']['alpha']:g})",
        fontsize=11,
    )
    fig.tight_layout(rect=(0, 0.03, 1, 0.95))
    suffix = str(path).rsplit(".", 1)
    fmt = suffix[1].lower() if len(suffix) == 2 else "svg"
    metadata = {"Date": None} if fmt == "svg" else None
    fig.savefig(path, format=fmt, metadata=metadata)


def _add_common_flags(parser: argparse.ArgumentParser, default_nperm: int) -> None:
    parser.add_argument("--alpha", type=float, default=0.05, help="test level (default 0.05)")
    parser.add_argument(
        "--nperm", type=int, default=default_nperm,
        help=f"number of label permutations (default {default_nperm})",
    )
    parser.add_argument(
        "--seed", type=int, default=None,
        help="RNG seed; drawn from system entropy and echoed when omitted",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="envanova",
        description="Graphical one-way ANOVA for functional data via global rank envelopes.",
        epilog=(
            "Worker threads are taken from the ENVANOVA_THREADS environment "
            "variable (default 1); thread count never changes results."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    test = sub.add_parser(
        "test",
        help="test equality of group mean curves in a wide-CSV dataset",
        description=(
            "Reads a wide CSV (header 'group,r1,...,rK', one row per function) "
            "and writes a JSON result document."
        ),
    )
    test.add_argument("dataset", help="path of the wide-CSV dataset")
    test.add_argument(
        "--kind",
        choices=[k.value for k in StatisticKind],
        default="means",
        help="test vector: group means, pairwise contrasts, their "
        "variance-rescaled variants, or pointwise (Welch-corrected) F",
    )
    _add_common_flags(test, default_nperm=1999)
    test.add_argument(
        "--ma-window", type=int, default=1,
        help="odd moving-average window for variance smoothing of the scaled kinds (default 1)",
    )
    test.add_argument(
        "--weights",
        help="file with one positive count per function; summary functions are "
        "rescaled by these counts before testing",
    )
    test.add_argument("--out", help="write the JSON document here instead of stdout")
    test.add_argument("--plot", help="write an envelope figure (SVG) to this path")
    test.set_defaults(func=_cmd_test)

    sim = sub.add_parser(
        "simulate",
        help="estimate rejection rates on synthetic curve groups",
        description=(
            "Writes a CSV power table over the requested dispersion levels and "
            "methods. For the ten-group model, rates benefit from far more "
            "permutations than the default (try --nperm 9999)."
        ),
    )
    sim.add_argument("--model", choices=MODELS, required=True, help="mean-curve model")
    sim.add_argument("--error", choices=ERRORS, default="iid", help="noise type (default iid)")
    sim.add_argument(
        "--sigma",
        default=",".join(str(s) for s in DEFAULT_SIGMAS),
        help="comma-separated dispersion levels (default %(default)s)",
    )
    sim.add_argument(
        "--methods",
        default=",".join(METHODS),
        help="comma-separated methods (default %(default)s)",
    )
    sim.add_argument("--runs", type=int, default=200, help="Monte Carlo runs per cell (default 200)")
    _add_common_flags(sim, default_nperm=999)
    sim.add_argument("--out", help="write the CSV table here instead of stdout")
    sim.set_defaults(func=_cmd_simulate)
    return parser


def _pick_seed(args) -> int:
    if args.seed is not None:
        if args.seed < 0:
            raise InvalidInputError("seed must be non-negative")
        return args.seed
    seed = secrets.randbits(63)
    print(f"envanova: seed drawn from entropy: {seed}", file=sys.stderr)
    return seed


def _cmd_test(args) -> int:
    ds = load_dataset(args.dataset)
    if args.weights:
        weights = load_weights(args.weights, ds.n_functions)
        ds = dataclasses.replace(ds, values=scale_summary_functions(ds.values, weights))
    cfg = AnovaConfig(
        kind=StatisticKind(args.kind),
        seed=_pick_seed(args),
        nperm=args.nperm,
        alpha=args.alpha,
        ma_window=args.ma_window,
    )
    result = run_anova(ds, cfg)
    doc = result_document(result, ds)
    if args.out:
        write_document(doc, args.out)
    else:
        sys.stdout.write(document_json(doc))
    if args.plot:
        emit_envelope_figure(doc, args.plot)
    return 0


def _split_list(raw: str, what: str) -> list[str]:
    items = [token.strip() for token in raw.split(",") if token.strip()]
    if not items:
        raise InvalidInputError(f"no {what} given")
    return items


def _cmd_simulate(args) -> int:
    try:
        sigmas = [float(s) for s in _split_list(args.sigma, "sigma values")]
    except ValueError:
        raise InvalidInputError(f"sigma values must be numeric: {args.sigma!r}") from None
    methods = _split_list(args.methods, "methods")
    if args.runs < 1:
        raise InvalidInputError("runs must be >= 1")
    cfg = AnovaConfig(
        kind=StatisticKind.F,
        seed=_pick_seed(args),
        nperm=args.nperm,
        alpha=args.alpha,
    )
    spec = ModelSpec(model=args.model, error=args.error, sigma=sigmas[0])
    cells = power_table([spec], methods, sigmas, cfg, args.runs)
    text = power_csv(cells)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateVarianceError as err:
        print(f"envanova: error: {err}", file=sys.stderr)
        return 3
    except (InvalidInputError, OSError) as err:
        print(f"envanova: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
