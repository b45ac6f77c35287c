"""Hypothesis selection rules.

Plain consensus selection over a score matrix, selection by human scores,
weighted selection (covering importance-sampled and model-probability
weighting), and multi-metric selection that averages several score matrices
before selecting.  Ties always break to the lowest index so every rule is
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import QualityVector, ScoreMatrix, row_mean, weighted_row_mean


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of a selection rule: the winning index, its score, the score
    vector the argmax ran over, and how many indices tied for the maximum."""

    selected_index: int
    selected_score: float
    score_vector: QualityVector
    tie_count: int

    def __post_init__(self) -> None:
        values = self.score_vector.values
        if values[self.selected_index] != values.max():
            raise ValueError("selected_index does not attain the maximum score")
        if self.tie_count < 1:
            raise ValueError("tie_count must be >= 1")


def _argmax_result(vector: QualityVector) -> DecodeResult:
    values = vector.values
    best = int(np.argmax(values))
    return DecodeResult(
        selected_index=best,
        selected_score=float(values[best]),
        score_vector=vector,
        tie_count=int(np.count_nonzero(values == values[best])),
    )


def mbr_decode(matrix: ScoreMatrix) -> DecodeResult:
    """Select the hypothesis with the highest mean utility over references."""
    return _argmax_result(row_mean(matrix))


def human_select(human_scores: QualityVector) -> DecodeResult:
    """Select the hypothesis a human scored highest."""
    return _argmax_result(human_scores)


def weighted_mbr(matrix: ScoreMatrix, weights: Sequence[float]) -> DecodeResult:
    """Select by weighted mean utility; uniform weights reproduce
    :func:`mbr_decode` exactly."""
    return _argmax_result(weighted_row_mean(matrix, weights))


def importance_weights(
    target_probs: Sequence[float], proposal_probs: Sequence[float]
) -> list[float]:
    """Element-wise target/proposal probability ratios, unnormalized.

    Feeding the result to :func:`weighted_mbr` turns samples drawn from the
    proposal into an estimate of the target-expected utility; the weighted
    mean normalizes, so the ratios need not sum to one.
    """
    target = [float(p) for p in target_probs]
    proposal = [float(q) for q in proposal_probs]
    if len(target) != len(proposal):
        raise ValueError(
            f"length mismatch: {len(target)} target vs {len(proposal)} proposal probabilities"
        )
    for q in proposal:
        if q <= 0:
            raise ValueError(f"invalid proposal probability {q!r}: must be > 0")
    for p in target:
        if p < 0:
            raise ValueError(f"invalid target probability {p!r}: must be >= 0")
    return [p / q for p, q in zip(target, proposal)]


def mambr_decode(matrices: Sequence[ScoreMatrix]) -> DecodeResult:
    """Select by the mean utility averaged over a set of score matrices.

    Each matrix typically comes from a different utility parameterization
    (different metric, different checkpoint, different tabular file).  With a
    single matrix this is exactly :func:`mbr_decode`.
    """
    if not matrices:
        raise ValueError("mambr_decode requires at least one score matrix")
    shape = (matrices[0].rows, matrices[0].cols)
    for k, m in enumerate(matrices):
        if (m.rows, m.cols) != shape:
            raise ValueError(
                f"matrix {k} has shape {(m.rows, m.cols)}, expected {shape}"
            )
    if len(matrices) == 1:
        return mbr_decode(matrices[0])
    mean = np.mean([m.values for m in matrices], axis=0)
    return mbr_decode(ScoreMatrix(mean))
