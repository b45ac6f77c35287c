"""Score-matrix and instance data model shared by the decoding, decomposition,
and analysis layers.

A :class:`DecodingInstance` bundles one input's hypotheses with the
pseudo-references sampled for it (plus optional gold references, per-hypothesis
human scores, and per-reference weights).  A :class:`ScoreMatrix` holds the
dense table of utility values with one row per hypothesis and one column per
reference.  All types are immutable after construction and all operations are
pure, so everything here is safe for concurrent use.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import IO, Callable, Iterable, Iterator, Sequence

import numpy as np

QUALITY_KINDS = ("mbr_mean", "human", "gold_mean")


class NoGoldReferencesError(ValueError):
    """Gold-reference scoring was requested on an instance without gold refs."""


class InvalidUtilityOutputError(ValueError):
    """A utility returned NaN or infinity for some (hypothesis, reference) cell."""


def _as_float_tuple(values: Iterable[float], name: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    for v in out:
        if not math.isfinite(v):
            raise ValueError(f"{name} contains non-finite value {v!r}")
    return out


@dataclass(frozen=True)
class DecodingInstance:
    """One decoding problem: a hypothesis set plus reference material.

    ``sample_weights`` carries per-reference weights (model probabilities or
    importance ratios); ``target_probs``/``proposal_probs`` optionally carry
    the two distributions those ratios are derived from.
    """

    id: str
    hypotheses: tuple[str, ...]
    pseudo_references: tuple[str, ...]
    gold_references: tuple[str, ...] | None = None
    human_scores: tuple[float, ...] | None = None
    sample_weights: tuple[float, ...] | None = None
    target_probs: tuple[float, ...] | None = None
    proposal_probs: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "hypotheses", tuple(str(h) for h in self.hypotheses))
        object.__setattr__(
            self, "pseudo_references", tuple(str(r) for r in self.pseudo_references)
        )
        if not self.hypotheses:
            raise ValueError(f"instance {self.id!r}: hypotheses must be non-empty")
        if not self.pseudo_references:
            raise ValueError(f"instance {self.id!r}: pseudo_references must be non-empty")
        if self.gold_references is not None:
            object.__setattr__(
                self, "gold_references", tuple(str(r) for r in self.gold_references)
            )
        if self.human_scores is not None:
            scores = _as_float_tuple(self.human_scores, "human_scores")
            if len(scores) != len(self.hypotheses):
                raise ValueError(
                    f"instance {self.id!r}: human_scores has length {len(scores)}, "
                    f"expected {len(self.hypotheses)}"
                )
            object.__setattr__(self, "human_scores", scores)
        if self.sample_weights is not None:
            weights = _as_float_tuple(self.sample_weights, "sample_weights")
            _validate_weights(weights, len(self.pseudo_references))
            object.__setattr__(self, "sample_weights", weights)
        for name in ("target_probs", "proposal_probs"):
            probs = getattr(self, name)
            if probs is None:
                continue
            probs = _as_float_tuple(probs, name)
            if len(probs) != len(self.pseudo_references):
                raise ValueError(
                    f"instance {self.id!r}: {name} has length {len(probs)}, "
                    f"expected {len(self.pseudo_references)}"
                )
            object.__setattr__(self, name, probs)


def _validate_weights(weights: Sequence[float], n_cols: int) -> None:
    if len(weights) != n_cols:
        raise ValueError(f"expected {n_cols} weights, got {len(weights)}")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    if not any(w > 0 for w in weights):
        raise ValueError("at least one weight must be positive")


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScoreMatrix:
    """Dense |H| x |Y| table of utility values; entry (i, j) scores
    hypothesis i against reference j."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.values, 2, "score matrix")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("score matrix must have at least one row and one column")
        object.__setattr__(self, "values", arr)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class QualityVector:
    """Per-hypothesis quality scores with the provenance of the numbers:
    ``mbr_mean`` (matrix row means), ``human``, or ``gold_mean``."""

    values: np.ndarray
    kind: str = "mbr_mean"

    def __post_init__(self) -> None:
        if self.kind not in QUALITY_KINDS:
            raise ValueError(f"unknown quality kind {self.kind!r}")
        arr = _frozen_array(self.values, 1, "quality vector")
        if arr.shape[0] < 1:
            raise ValueError("quality vector must be non-empty")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.shape[0]


UtilityCallable = Callable[[str, str], float]


def build_score_matrix(
    instance: DecodingInstance,
    utility,
    reference_set: str = "pseudo",
) -> ScoreMatrix:
    """Evaluate a utility on every (hypothesis, reference) pair.

    ``utility`` is either a callable ``(hypothesis, reference) -> float`` or an
    object exposing ``lookup_cell(i, j, hypothesis, reference)`` (used by the
    tabular adapter so externally computed scores can be keyed by index).
    ``reference_set`` selects the pseudo or gold references.
    """
    if reference_set == "pseudo":
        refs = instance.pseudo_references
    elif reference_set == "gold":
        if instance.gold_references is None:
            raise NoGoldReferencesError(
                f"instance {instance.id!r} has no gold references"
            )
        refs = instance.gold_references
        if not refs:
            raise NoGoldReferencesError(
                f"instance {instance.id!r} has an empty gold reference set"
            )
    else:
        raise ValueError(f"unknown reference set {reference_set!r}")

    lookup = getattr(utility, "lookup_cell", None)
    values = np.empty((len(instance.hypotheses), len(refs)), dtype=np.float64)
    for i, h in enumerate(instance.hypotheses):
        for j, r in enumerate(refs):
            score = lookup(i, j, h, r) if lookup is not None else utility(h, r)
            score = float(score)
            if not math.isfinite(score):
                raise InvalidUtilityOutputError(
                    f"utility returned non-finite value {score!r} at cell "
                    f"(hypothesis {i}, reference {j}) of instance {instance.id!r}"
                )
            values[i, j] = score
    return ScoreMatrix(values)


def row_mean(matrix: ScoreMatrix) -> QualityVector:
    """Average each hypothesis's utility over all references."""
    return QualityVector(matrix.values.mean(axis=1), kind="mbr_mean")


def weighted_row_mean(matrix: ScoreMatrix, weights: Sequence[float]) -> QualityVector:
    """Weighted average over references, normalized by the weight sum.

    Weights need not sum to one (importance ratios are unnormalized in
    general); uniform weights reduce to :func:`row_mean` exactly.
    """
    w = np.asarray(list(weights), dtype=np.float64)
    if w.ndim != 1:
        raise ValueError("weights must be one-dimensional")
    _validate_weights(w.tolist(), matrix.cols)
    values = (matrix.values * w).sum(axis=1) / w.sum()
    return QualityVector(values, kind="mbr_mean")


# ---------------------------------------------------------------------------
# Serialization: JSONL instances and CSV score matrices.
# ---------------------------------------------------------------------------

_JSONL_KEYS = {
    "id",
    "hypotheses",
    "pseudo_refs",
    "gold_refs",
    "human_scores",
    "weights",
    "target_probs",
    "proposal_probs",
}


def instance_from_obj(obj: dict) -> DecodingInstance:
    """Build an instance from one decoded JSONL object."""
    if not isinstance(obj, dict):
        raise ValueError("instance record must be a JSON object")
    unknown = set(obj) - _JSONL_KEYS
    if unknown:
        raise ValueError(f"unknown instance keys: {sorted(unknown)}")
    if "id" not in obj or "hypotheses" not in obj or "pseudo_refs" not in obj:
        raise ValueError("instance record requires 'id', 'hypotheses', 'pseudo_refs'")
    return DecodingInstance(
        id=str(obj["id"]),
        hypotheses=tuple(obj["hypotheses"]),
        pseudo_references=tuple(obj["pseudo_refs"]),
        gold_references=tuple(obj["gold_refs"]) if obj.get("gold_refs") is not None else None,
        human_scores=tuple(obj["human_scores"]) if obj.get("human_scores") is not None else None,
        sample_weights=tuple(obj["weights"]) if obj.get("weights") is not None else None,
        target_probs=tuple(obj["target_probs"]) if obj.get("target_probs") is not None else None,
        proposal_probs=tuple(obj["proposal_probs"]) if obj.get("proposal_probs") is not None else None,
    )


def instance_to_obj(instance: DecodingInstance) -> dict:
    obj: dict = {
        "id": instance.id,
        "hypotheses": list(instance.hypotheses),
        "pseudo_refs": list(instance.pseudo_references),
    }
    if instance.gold_references is not None:
        obj["gold_refs"] = list(instance.gold_references)
    if instance.human_scores is not None:
        obj["human_scores"] = list(instance.human_scores)
    if instance.sample_weights is not None:
        obj["weights"] = list(instance.sample_weights)
    if instance.target_probs is not None:
        obj["target_probs"] = list(instance.target_probs)
    if instance.proposal_probs is not None:
        obj["proposal_probs"] = list(instance.proposal_probs)
    return obj


def read_instances(stream: IO[str]) -> Iterator[DecodingInstance]:
    """Stream instances from a JSONL file, one object per non-blank line.

    Errors carry the 1-based line number of the offending record.
    """
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            yield instance_from_obj(obj)
        except (json.JSONDecodeError, ValueError, TypeError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc


def write_instances(stream: IO[str], instances: Iterable[DecodingInstance]) -> None:
    for instance in instances:
        stream.write(json.dumps(instance_to_obj(instance)) + "\n")


def write_matrix_csv(stream: IO[str], matrix: ScoreMatrix) -> None:
    """Write the dense form: one hypothesis per row, ``repr`` floats so values
    round-trip exactly."""
    writer = csv.writer(stream)
    for row in matrix.values:
        writer.writerow([repr(float(v)) for v in row])


_LONG_HEADER = ["hyp_index", "ref_index", "score"]


def read_matrix_csv(stream: IO[str]) -> ScoreMatrix:
    """Read either matrix CSV form.

    Long form starts with the header ``hyp_index,ref_index,score``; anything
    else is treated as dense numeric rows.
    """
    rows = [row for row in csv.reader(stream) if row]
    if not rows:
        raise ValueError("empty matrix CSV")
    if [c.strip() for c in rows[0]] == _LONG_HEADER:
        cells: dict[tuple[int, int], float] = {}
        for record in rows[1:]:
            if len(record) != 3:
                raise ValueError(f"malformed long-form row: {record!r}")
            i, j, score = int(record[0]), int(record[1]), float(record[2])
            cells[(i, j)] = score
        n_rows = max(i for i, _ in cells) + 1
        n_cols = max(j for _, j in cells) + 1
        if len(cells) != n_rows * n_cols:
            raise ValueError("long-form matrix CSV has missing cells")
        values = np.empty((n_rows, n_cols), dtype=np.float64)
        for (i, j), score in cells.items():
            values[i, j] = score
        return ScoreMatrix(values)
    values = np.asarray([[float(c) for c in row] for row in rows], dtype=np.float64)
    return ScoreMatrix(values)


def matrix_csv_string(matrix: ScoreMatrix) -> str:
    buf = io.StringIO()
    write_matrix_csv(buf, matrix)
    return buf.getvalue()
