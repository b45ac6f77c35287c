"""Bias-diversity decomposition of the quality-estimation error.

The squared gap between per-hypothesis human scores and consensus (row-mean)
scores splits exactly into a bias term (distance of individual utility scores
from the human score) minus a diversity term (spread of utility scores around
their row mean).  This module computes those terms, the same quantities
restricted to the selected row, an ensemble-style reformulation into averaged
bias/variance/covariance components, and the gold-reference approximation of
the bias term.

The ensemble reformulation is computed literally as printed in its source,
including the quirk that the covariance component's second factor reuses the
first column's entries (see :func:`brown_terms` and
:func:`brown_cross_check`); the canonical bias/diversity values are always
the direct ones from :func:`bias_term` and :func:`diversity_term`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import QualityVector, ScoreMatrix, row_mean
from .decode import mbr_decode

REL_TOL = 1e-9


def mse(human: QualityVector, mean: QualityVector) -> float:
    """Mean squared difference between two per-hypothesis score vectors."""
    if len(human) != len(mean):
        raise ValueError(
            f"length mismatch: {len(human)} human scores vs {len(mean)} mean scores"
        )
    return float(np.mean((human.values - mean.values) ** 2))


def _mean_squared_residual(center: np.ndarray, matrix: ScoreMatrix) -> float:
    # Shared by bias_term, diversity_term, and pseudo_bias so that equal
    # centers give bit-identical results.
    return float(np.mean((center[:, None] - matrix.values) ** 2))


def bias_term(human: QualityVector, matrix: ScoreMatrix) -> float:
    """Mean squared gap between the human score and every utility score in
    the hypothesis's row, averaged over all cells."""
    if len(human) != matrix.rows:
        raise ValueError(
            f"length mismatch: {len(human)} human scores vs {matrix.rows} matrix rows"
        )
    return _mean_squared_residual(human.values, matrix)


def diversity_term(matrix: ScoreMatrix) -> float:
    """Mean squared spread of utility scores around their row means."""
    return _mean_squared_residual(row_mean(matrix).values, matrix)


def one_best_terms(
    human: QualityVector, matrix: ScoreMatrix
) -> tuple[float, float, float, int]:
    """Bias, diversity, and squared error restricted to the selected row.

    Returns (one_best_bias, one_best_diversity, one_best_mse, one_best_index)
    where the index is the consensus selection on the same matrix.
    """
    if len(human) != matrix.rows:
        raise ValueError(
            f"length mismatch: {len(human)} human scores vs {matrix.rows} matrix rows"
        )
    best = mbr_decode(matrix).selected_index
    row = matrix.values[best]
    mean = row.mean()
    ob_bias = float(np.mean((human.values[best] - row) ** 2))
    ob_diversity = float(np.mean((mean - row) ** 2))
    ob_mse = float((human.values[best] - mean) ** 2)
    return ob_bias, ob_diversity, ob_mse, best


@dataclass(frozen=True)
class BrownTerms:
    """Averaged-component reformulation of the bias and diversity terms.

    ``bias_bar`` is the reference-averaged gap between column means and the
    mean human score; ``var_bar`` the average within-column variance;
    ``cov_bar`` the average cross-column term (as printed; equals 0 with a
    single reference, flagged by ``cov_defined``); ``omega`` the shared
    variance-plus-dispersion component.  ``bias_eq10``/``diversity_eq10`` are
    the reformulated bias and diversity built from these pieces.
    """

    bias_bar: float
    var_bar: float
    cov_bar: float
    omega: float
    bias_eq10: float
    diversity_eq10: float
    cov_defined: bool = True


def brown_terms(human: QualityVector, matrix: ScoreMatrix) -> BrownTerms:
    """Compute the averaged bias/variance/covariance reformulation.

    All components are evaluated verbatim from their printed definitions,
    with hypotheses as the averaging variable and references as ensemble
    members.  With one reference the cross-column average is undefined
    (division by zero); it is reported as 0 with ``cov_defined=False``.
    """
    if len(human) != matrix.rows:
        raise ValueError(
            f"length mismatch: {len(human)} human scores vs {matrix.rows} matrix rows"
        )
    u = matrix.values
    n_refs = matrix.cols
    col_means = u.mean(axis=0)
    grand_mean = u.mean()
    human_mean = human.values.mean()

    bias_bar = float(np.mean(col_means - human_mean))
    centered = u - col_means[None, :]
    col_vars = np.mean(centered**2, axis=0)
    var_bar = float(np.mean(col_vars))

    if n_refs >= 2:
        # Pair term for columns (c, c'): mean over hypotheses k of
        # (u[k,c] - m_c) * (u[k,c] - m_c'), exactly as printed: the second
        # factor reuses column c's entries, centered by column c''s mean.
        total = 0.0
        for c in range(n_refs):
            for c2 in range(n_refs):
                if c2 == c:
                    continue
                total += float(np.mean(centered[:, c] * (u[:, c] - col_means[c2])))
        cov_bar = total / (n_refs * (n_refs - 1))
        cov_defined = True
    else:
        cov_bar = 0.0
        cov_defined = False

    omega = var_bar + float(np.mean((col_means - grand_mean) ** 2))
    bias_eq10 = bias_bar**2 + omega
    diversity_eq10 = omega - ((1.0 / n_refs) * var_bar + (1.0 - 1.0 / n_refs) * cov_bar)
    return BrownTerms(
        bias_bar=bias_bar,
        var_bar=var_bar,
        cov_bar=cov_bar,
        omega=omega,
        bias_eq10=bias_eq10,
        diversity_eq10=diversity_eq10,
        cov_defined=cov_defined,
    )


def brown_cross_check(human: QualityVector, matrix: ScoreMatrix) -> dict:
    """Diagnostic comparison of the reformulated terms against the direct ones.

    Records (never asserts) how far the printed reformulation is from the
    direct bias/diversity values, alongside a variant using the conventional
    pairwise covariance (second factor from column c', centered by its own
    mean) for reference.  Keys:

    - ``cancellation_residual``: |(bias_eq10 - diversity_eq10) -
      (bias_bar^2 + var_bar/n + (1-1/n) cov_bar)|, zero up to float error by
      construction.
    - ``bias_residual`` / ``diversity_residual`` / ``difference_residual``:
      absolute gaps between the reformulated values and the direct bias,
      diversity, and their difference (the direct difference equals the
      mean squared error).
    - ``pairwise_cov`` and ``pairwise_difference_residual``: the conventional
      covariance and the gap of the reformulated difference built from it to
      the direct difference.
    """
    terms = brown_terms(human, matrix)
    direct_bias = bias_term(human, matrix)
    direct_diversity = diversity_term(matrix)
    direct_difference = direct_bias - direct_diversity

    n_refs = matrix.cols
    combo = terms.bias_bar**2 + (1.0 / n_refs) * terms.var_bar
    if n_refs >= 2:
        combo += (1.0 - 1.0 / n_refs) * terms.cov_bar

    u = matrix.values
    col_means = u.mean(axis=0)
    centered = u - col_means[None, :]
    if n_refs >= 2:
        total = 0.0
        for c in range(n_refs):
            for c2 in range(n_refs):
                if c2 == c:
                    continue
                total += float(np.mean(centered[:, c] * centered[:, c2]))
        pairwise_cov = total / (n_refs * (n_refs - 1))
    else:
        pairwise_cov = 0.0
    pairwise_combo = terms.bias_bar**2 + (1.0 / n_refs) * terms.var_bar
    if n_refs >= 2:
        pairwise_combo += (1.0 - 1.0 / n_refs) * pairwise_cov

    return {
        "cancellation_residual": abs((terms.bias_eq10 - terms.diversity_eq10) - combo),
        "bias_residual": abs(terms.bias_eq10 - direct_bias),
        "diversity_residual": abs(terms.diversity_eq10 - direct_diversity),
        "difference_residual": abs((terms.bias_eq10 - terms.diversity_eq10) - direct_difference),
        "pairwise_cov": pairwise_cov,
        "pairwise_difference_residual": abs(pairwise_combo - direct_difference),
    }


def pseudo_bias(matrix: ScoreMatrix, gold_matrix: ScoreMatrix) -> float:
    """Bias term with the human scores replaced by mean utilities against
    gold references.

    When the gold matrix equals the pseudo-reference matrix this coincides
    with :func:`diversity_term` exactly.
    """
    if gold_matrix is None:
        raise ValueError("pseudo_bias requires a gold-reference score matrix")
    if gold_matrix.rows != matrix.rows:
        raise ValueError(
            f"row-count mismatch: {matrix.rows} pseudo rows vs {gold_matrix.rows} gold rows"
        )
    return _mean_squared_residual(row_mean(gold_matrix).values, matrix)


@dataclass(frozen=True)
class DecompositionReport:
    """All decomposition quantities for one instance.

    Construction checks the exact-identity invariants: total error equals
    bias minus diversity (relative tolerance 1e-9), and likewise on the
    selected row.
    """

    mse: float
    bias: float
    diversity: float
    one_best_bias: float
    one_best_diversity: float
    one_best_mse: float
    one_best_index: int
    brown: BrownTerms
    pseudo_bias: float | None = None

    def __post_init__(self) -> None:
        for name in ("mse", "bias", "diversity", "one_best_bias",
                     "one_best_diversity", "one_best_mse"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.pseudo_bias is not None and self.pseudo_bias < 0:
            raise ValueError("pseudo_bias must be non-negative")
        if abs(self.mse - (self.bias - self.diversity)) > REL_TOL * (1.0 + abs(self.bias)):
            raise ValueError("mse does not equal bias - diversity within tolerance")
        if abs(self.one_best_mse - (self.one_best_bias - self.one_best_diversity)) > (
            REL_TOL * (1.0 + abs(self.one_best_bias))
        ):
            raise ValueError(
                "one_best_mse does not equal one_best_bias - one_best_diversity "
                "within tolerance"
            )


def decompose_report(
    human: QualityVector,
    matrix: ScoreMatrix,
    gold_matrix: ScoreMatrix | None = None,
) -> DecompositionReport:
    """Assemble the full report for one score matrix."""
    ob_bias, ob_diversity, ob_mse, ob_index = one_best_terms(human, matrix)
    return DecompositionReport(
        mse=mse(human, row_mean(matrix)),
        bias=bias_term(human, matrix),
        diversity=diversity_term(matrix),
        one_best_bias=ob_bias,
        one_best_diversity=ob_diversity,
        one_best_mse=ob_mse,
        one_best_index=ob_index,
        brown=brown_terms(human, matrix),
        pseudo_bias=None if gold_matrix is None else pseudo_bias(matrix, gold_matrix),
    )
