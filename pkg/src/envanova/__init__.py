"""Graphical one-way ANOVA for functional data via global rank envelopes.

Test whether groups of curves share a mean function, with a Monte Carlo
permutation test whose graphical envelope shows where the groups differ.
"""

__version__ = "0.1.0"

from .envelope import (
    EnvelopeVerdict,
    GlobalEnvelope,
    envelope_verdict,
    erl_critical_value,
    erl_envelope,
    rank_envelope_lth,
)
from .errors import (
    DegenerateVarianceError,
    EnvAnovaError,
    InsufficientPermutationsWarning,
    InvalidInputError,
    ParseError,
)
from .fanova import (
    METHODS,
    AnovaConfig,
    AnovaResult,
    CoordinateLabel,
    FunctionalDataset,
    StatisticKind,
    baseline_fmax,
    baseline_pmin,
    build_ensemble,
    contrast_pairs,
    coordinate_labels,
    f_statistics,
    group_contrasts_vector,
    group_means_vector,
    method_pvalues,
    moving_average,
    permute_group_labels,
    rescale_functions,
    run_anova,
    scale_summary_functions,
    welch_f_statistics,
)
from .rankcore import (
    ErlMeasures,
    PValueTriple,
    RankMatrix,
    Sidedness,
    TestVectorEnsemble,
    compute_erl_measures,
    compute_extreme_ranks,
    compute_p_values,
    compute_pointwise_ranks,
    erl_precedes,
)
from .simulate import (
    DEFAULT_SIGMAS,
    ERRORS,
    MODELS,
    ModelSpec,
    PowerCell,
    PowerEstimate,
    estimate_power,
    generate_dataset,
    power_table,
)

__all__ = [
    "__version__",
    "AnovaConfig",
    "AnovaResult",
    "CoordinateLabel",
    "DegenerateVarianceError",
    "DEFAULT_SIGMAS",
    "ERRORS",
    "EnvAnovaError",
    "EnvelopeVerdict",
    "ErlMeasures",
    "FunctionalDataset",
    "GlobalEnvelope",
    "InsufficientPermutationsWarning",
    "InvalidInputError",
    "METHODS",
    "MODELS",
    "ModelSpec",
    "ParseError",
    "PowerCell",
    "PowerEstimate",
    "PValueTriple",
    "RankMatrix",
    "Sidedness",
    "StatisticKind",
    "TestVectorEnsemble",
    "baseline_fmax",
    "baseline_pmin",
    "build_ensemble",
    "compute_erl_measures",
    "compute_extreme_ranks",
    "compute_p_values",
    "compute_pointwise_ranks",
    "contrast_pairs",
    "coordinate_labels",
    "envelope_verdict",
    "erl_critical_value",
    "erl_envelope",
    "erl_precedes",
    "estimate_power",
    "f_statistics",
    "generate_dataset",
    "group_contrasts_vector",
    "group_means_vector",
    "method_pvalues",
    "moving_average",
    "permute_group_labels",
    "power_table",
    "rank_envelope_lth",
    "rescale_functions",
    "run_anova",
    "scale_summary_functions",
    "welch_f_statistics",
]
