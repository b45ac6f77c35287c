"""Correlation statistics and the subsampling/scaling study harness.

The harness reruns consensus decoding on reference subsets of growing size
with a counter-based RNG keyed by (seed, instance id, size, trial), so runs
are reproducible and independent of execution order: serial and parallel
runs produce identical curves.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .core import DecodingInstance, ScoreMatrix, build_score_matrix, row_mean
from .decode import mbr_decode

MEASURE_LABELS = (
    "overall_bias",
    "one_best_bias",
    "overall_diversity",
    "one_best_diversity",
    "overall_mse",
    "one_best_mse",
    "performance",
)
# Lower is better for these, so they are negated before correlating.
NEGATED_LABELS = frozenset(
    {"overall_bias", "one_best_bias", "overall_mse", "one_best_mse"}
)


class ZeroVarianceError(ValueError):
    """A correlation was requested against a constant series."""


class DegenerateCorrelationError(ValueError):
    """A correlation of magnitude 1 cannot be averaged in z-space."""


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    xa = np.asarray(list(x), dtype=np.float64)
    ya = np.asarray(list(y), dtype=np.float64)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError(f"series lengths differ: {xa.shape} vs {ya.shape}")
    if xa.size < 2:
        raise ValueError("correlation requires at least two points")
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise ZeroVarianceError("zero variance: cannot correlate a constant series")
    return float(dx @ dy) / (sx * sy)


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation: Pearson on average-ranked values."""
    xa = list(x)
    ya = list(y)
    if len(xa) != len(ya):
        raise ValueError(f"series lengths differ: {len(xa)} vs {len(ya)}")
    return pearson(rankdata(xa), rankdata(ya))


def fisher_z_average(rs: Sequence[float], clamp: bool = False) -> float:
    """Average correlations through the z-transform: tanh(mean(atanh(r))).

    Correlations of magnitude exactly 1 diverge in z-space and raise unless
    ``clamp=True``, which pulls them to +/-(1 - 1e-12) first.
    """
    values = [float(r) for r in rs]
    if not values:
        raise ValueError("cannot average an empty list of correlations")
    zs = []
    for r in values:
        if abs(r) >= 1.0:
            if not clamp:
                raise DegenerateCorrelationError(
                    f"correlation {r!r} has magnitude >= 1; enable clamp to average it"
                )
            r = math.copysign(1.0 - 1e-12, r)
        zs.append(math.atanh(r))
    return math.tanh(sum(zs) / len(zs))


@dataclass(frozen=True)
class MeasureSeries:
    """One measure's value per (sampling method x sample size) configuration.

    ``sign_convention`` marks series that are negated before correlating
    (error-like measures where lower is better); when omitted it is derived
    from the label.
    """

    label: str
    values: tuple[float, ...]
    sign_convention: bool | None = None
    dataset: str = "default"

    def __post_init__(self) -> None:
        if self.label not in MEASURE_LABELS:
            raise ValueError(f"unknown measure label {self.label!r}")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.sign_convention is None:
            object.__setattr__(self, "sign_convention", self.label in NEGATED_LABELS)

    def oriented_values(self) -> tuple[float, ...]:
        if self.sign_convention:
            return tuple(-v for v in self.values)
        return self.values


@dataclass(frozen=True)
class CorrelationRow:
    measure: str
    dataset: str
    spearman: float
    pearson: float


def correlation_report(measures: Sequence[MeasureSeries]) -> list[CorrelationRow]:
    """Correlate every measure against the performance series.

    Measures are grouped by dataset; each dataset needs exactly one
    "performance" series and aligned lengths.  With several datasets a
    z-transform average per measure is appended with dataset "avg".
    """
    by_dataset: dict[str, list[MeasureSeries]] = {}
    for series in measures:
        by_dataset.setdefault(series.dataset, []).append(series)

    rows: list[CorrelationRow] = []
    aggregates: dict[str, list[tuple[float, float]]] = {}
    for dataset, group in by_dataset.items():
        performance = [s for s in group if s.label == "performance"]
        if len(performance) != 1:
            raise ValueError(
                f"dataset {dataset!r} needs exactly one performance series, "
                f"found {len(performance)}"
            )
        perf = performance[0].oriented_values()
        for series in group:
            if series.label == "performance":
                continue
            if len(series.values) != len(perf):
                raise ValueError(
                    f"series {series.label!r} in dataset {dataset!r} has "
                    f"{len(series.values)} values, performance has {len(perf)}"
                )
            oriented = series.oriented_values()
            row = CorrelationRow(
                measure=series.label,
                dataset=dataset,
                spearman=spearman(oriented, perf),
                pearson=pearson(oriented, perf),
            )
            rows.append(row)
            aggregates.setdefault(series.label, []).append((row.spearman, row.pearson))

    if len(by_dataset) > 1:
        for label, pairs in aggregates.items():
            rows.append(
                CorrelationRow(
                    measure=label,
                    dataset="avg",
                    spearman=fisher_z_average([s for s, _ in pairs]),
                    pearson=fisher_z_average([p for _, p in pairs]),
                )
            )
    return rows


def correlation_csv(rows: Sequence[CorrelationRow]) -> str:
    lines = ["measure,dataset,spearman,pearson"]
    for row in rows:
        lines.append(f"{row.measure},{row.dataset},{row.spearman!r},{row.pearson!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Scaling harness.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalingCurve:
    """Mean and spread of corpus-level selection quality per sample size.

    ``per_size_stddev`` is the sample standard deviation across trials of the
    per-trial corpus means (0 with a single trial)."""

    sample_sizes: tuple[int, ...]
    per_size_mean: tuple[float, ...]
    per_size_stddev: tuple[float, ...]
    trials: int
    seed: int

    def __post_init__(self) -> None:
        if not (len(self.sample_sizes) == len(self.per_size_mean) == len(self.per_size_stddev)):
            raise ValueError("curve fields must have equal lengths")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def subsample_indices(seed: int, instance_id: str, size: int, trial: int, n_refs: int) -> np.ndarray:
    """Deterministic without-replacement column choice for one configuration.

    A counter-based generator is keyed by a digest of (seed, instance id,
    size, trial), so any configuration's draw is independent of every other
    and of evaluation order.
    """
    digest = hashlib.sha256(
        f"{seed}|{instance_id}|{size}|{trial}".encode("utf-8")
    ).digest()
    key = int.from_bytes(digest[:16], "little")
    rng = np.random.Generator(np.random.Philox(key=key))
    return rng.choice(n_refs, size=size, replace=False)


def _instance_scores(
    instance: DecodingInstance,
    utility,
    sizes: Sequence[int],
    trials: int,
    seed: int,
) -> np.ndarray:
    """Selection quality for one instance at every (size, trial) cell."""
    n_refs = len(instance.pseudo_references)
    if max(sizes) > n_refs:
        raise ValueError(
            f"instance {instance.id!r} has {n_refs} pseudo-references, "
            f"cannot subsample {max(sizes)}"
        )
    matrix = build_score_matrix(instance, utility, reference_set="pseudo")
    if instance.human_scores is not None:
        quality = np.asarray(instance.human_scores, dtype=np.float64)
    elif instance.gold_references is not None:
        gold = build_score_matrix(instance, utility, reference_set="gold")
        quality = row_mean(gold).values
    else:
        raise ValueError(
            f"instance {instance.id!r} has neither human scores nor gold references "
            "to score selections with"
        )
    scores = np.empty((len(sizes), trials), dtype=np.float64)
    for si, size in enumerate(sizes):
        for trial in range(trials):
            cols = subsample_indices(seed, instance.id, size, trial, n_refs)
            sub = ScoreMatrix(matrix.values[:, cols])
            scores[si, trial] = quality[mbr_decode(sub).selected_index]
    return scores


def scaling_harness(
    instances: Iterable[DecodingInstance],
    utility,
    sizes: Sequence[int],
    trials: int,
    seed: int = 0,
    max_workers: int | None = None,
) -> ScalingCurve:
    """Subsampled-decoding performance curve over reference-set sizes.

    For each size and trial, every instance's pseudo-references are
    subsampled without replacement, consensus decoding runs on the reduced
    matrix, and the selection is scored by the instance's human scores (or by
    mean utility against gold references when no human scores exist).
    Reported means/stddevs are over the per-trial corpus means.

    ``max_workers`` distributes instances over threads; results are
    accumulated in instance order, so parallel output is identical to serial.
    """
    sizes = [int(s) for s in sizes]
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("sizes must be a non-empty list of positive counts")
    if trials < 1:
        raise ValueError("trials must be >= 1")

    total = np.zeros((len(sizes), trials), dtype=np.float64)
    count = 0
    if max_workers is None:
        for instance in instances:
            total += _instance_scores(instance, utility, sizes, trials, seed)
            count += 1
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            for scores in pool.map(
                lambda inst: _instance_scores(inst, utility, sizes, trials, seed),
                instances,
            ):
                total += scores
                count += 1
    if count == 0:
        raise ValueError("scaling harness requires at least one instance")

    per_trial_means = total / count
    means = per_trial_means.mean(axis=1)
    if trials > 1:
        stds = per_trial_means.std(axis=1, ddof=1)
    else:
        stds = np.zeros(len(sizes))
    return ScalingCurve(
        sample_sizes=tuple(sizes),
        per_size_mean=tuple(float(m) for m in means),
        per_size_stddev=tuple(float(s) for s in stds),
        trials=trials,
        seed=seed,
    )


def scaling_csv(curve: ScalingCurve) -> str:
    """CSV form of a curve; the seed rides along as a leading comment."""
    lines = [f"# seed={curve.seed}", "size,mean,stddev,trials"]
    for size, mean, std in zip(curve.sample_sizes, curve.per_size_mean, curve.per_size_stddev):
        lines.append(f"{size},{mean!r},{std!r},{curve.trials}")
    return "\n".join(lines) + "\n"
