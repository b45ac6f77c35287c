"""MBR decoding toolkit: consensus selection over sampled references,
bias-diversity decomposition of its quality-estimation error, and an exact
information-theoretic engine for bound and scaling diagnostics."""

from .core import (
    DecodingInstance,
    InvalidUtilityOutputError,
    NoGoldReferencesError,
    QualityVector,
    ScoreMatrix,
    build_score_matrix,
    row_mean,
    weighted_row_mean,
)
from .decode import (
    DecodeResult,
    human_select,
    importance_weights,
    mambr_decode,
    mbr_decode,
    weighted_mbr,
)
from .decomposition import (
    BrownTerms,
    DecompositionReport,
    bias_term,
    brown_cross_check,
    brown_terms,
    decompose_report,
    diversity_term,
    mse,
    one_best_terms,
    pseudo_bias,
)
from .infotheory import (
    DiscreteJoint,
    ITReport,
    bayes_error,
    conditional_total_correlation,
    decompose_mi,
    entropy,
    error_bounds,
    growing_target_scan,
    make_ci_joint,
    monotonicity_scan,
    mutual_information,
    submodularity_check,
    supermodularity_check,
    total_correlation,
)
from .analysis import (
    MeasureSeries,
    ScalingCurve,
    correlation_report,
    fisher_z_average,
    pearson,
    scaling_harness,
    spearman,
)
from .metrics import (
    TabularUtility,
    UtilityFunction,
    chrf,
    get_metric,
    sentence_bleu,
    tabular_lookup,
    token_f1,
)

__version__ = "0.1.0"
