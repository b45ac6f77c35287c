"""Exact information-theoretic computations on small discrete joints.

A :class:`DiscreteJoint` is a dense probability table over n predictor
variables and one target variable.  Everything here is computed by exact
marginalization and summation in bits (log base 2): entropies, mutual
information, the relevancy / conditional-redundancy / redundancy split of
the predictor-target information, Fano-style lower and Hellman-Raviv-style
upper bounds on the error of the best predictor, and the exact error of the
maximum-a-posteriori predictor.  Enumeration-based scanners verify
monotonicity and submodularity claims over growing predictor subsets.

Desk-scale only: tables are capped at 10**6 cells and subset enumeration at
a small variable count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import chain as _chain, combinations
from typing import IO, Sequence

import numpy as np

MAX_CELLS = 1_000_000
PMF_TOL = 1e-12
IDENTITY_TOL = 1e-9
SIGN_TOL = 1e-12

METRIC_NAMES = (
    "relevancy",
    "redundancy",
    "cond_redundancy",
    "it_diversity",
    "mi",
    "lower_bound",
    "upper_bound",
)


@dataclass(frozen=True)
class DiscreteJoint:
    """Dense joint pmf over predictors X_1..X_n and a target.

    ``pmf`` has shape (*alphabet_sizes, target_size): predictor axes first
    (X_1 slowest), target axis last.  Entries are non-negative and sum to 1
    within 1e-12.  The intended regime has target_size >= 2; a degenerate
    single-value target is representable but rejected by the error bounds.
    """

    pmf: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pmf, dtype=np.float64)
        if arr.ndim < 1:
            raise ValueError("pmf must have at least the target axis")
        if arr.size > MAX_CELLS:
            raise ValueError(f"pmf has {arr.size} cells, cap is {MAX_CELLS}")
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValueError("pmf entries must be finite and non-negative")
        total = float(arr.sum())
        if abs(total - 1.0) > PMF_TOL:
            raise ValueError(f"pmf sums to {total!r}, expected 1 within {PMF_TOL}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "pmf", arr)

    @property
    def n_vars(self) -> int:
        return self.pmf.ndim - 1

    @property
    def alphabet_sizes(self) -> tuple[int, ...]:
        return self.pmf.shape[:-1]

    @property
    def target_size(self) -> int:
        return self.pmf.shape[-1]


def entropy(dist) -> float:
    """Shannon entropy of a marginal pmf in bits, with 0 log 0 = 0."""
    p = np.asarray(dist, dtype=np.float64).ravel()
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("pmf entries must be finite and non-negative")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"pmf sums to {total!r}, expected 1")
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _check_subset(joint: DiscreteJoint, subset: Sequence[int]) -> tuple[int, ...]:
    out = tuple(int(i) for i in subset)
    if len(set(out)) != len(out):
        raise ValueError(f"subset {out} has duplicate indices")
    for i in out:
        if not 0 <= i < joint.n_vars:
            raise ValueError(f"predictor index {i} out of range for {joint.n_vars} variables")
    return tuple(sorted(out))


def _marginal(joint: DiscreteJoint, subset: tuple[int, ...], with_target: bool) -> np.ndarray:
    keep = set(subset)
    if with_target:
        keep.add(joint.n_vars)
    drop = tuple(ax for ax in range(joint.pmf.ndim) if ax not in keep)
    return joint.pmf.sum(axis=drop) if drop else joint.pmf


def _marginal_entropy(joint: DiscreteJoint, subset: tuple[int, ...], with_target: bool) -> float:
    p = _marginal(joint, subset, with_target).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def target_entropy(joint: DiscreteJoint) -> float:
    """H of the target variable in bits."""
    return _marginal_entropy(joint, (), with_target=True)


def mutual_information(joint: DiscreteJoint, subset: Sequence[int]) -> float:
    """I(X_subset; target) in bits by exact marginalization.

    The empty subset gives 0.  Non-negative up to ~1e-12 of float error; the
    raw value is returned unclamped.
    """
    s = _check_subset(joint, subset)
    if not s:
        return 0.0
    return (
        _marginal_entropy(joint, s, False)
        + target_entropy(joint)
        - _marginal_entropy(joint, s, True)
    )


def total_correlation(joint: DiscreteJoint, subset: Sequence[int]) -> float:
    """Sum of single-variable entropies minus the joint entropy of the subset."""
    s = _check_subset(joint, subset)
    if len(s) < 2:
        return 0.0
    singles = sum(_marginal_entropy(joint, (i,), False) for i in s)
    return singles - _marginal_entropy(joint, s, False)


def conditional_total_correlation(joint: DiscreteJoint, subset: Sequence[int]) -> float:
    """Total correlation of the subset conditioned on the target."""
    s = _check_subset(joint, subset)
    if len(s) < 2:
        return 0.0
    h_target = target_entropy(joint)
    singles = sum(_marginal_entropy(joint, (i,), True) - h_target for i in s)
    joint_cond = _marginal_entropy(joint, s, True) - h_target
    return singles - joint_cond


def bayes_error(joint: DiscreteJoint, subset: Sequence[int]) -> float:
    """Error probability of the MAP predictor of the target from X_subset."""
    s = _check_subset(joint, subset)
    p = _marginal(joint, s, with_target=True)
    return float(1.0 - p.max(axis=-1).sum())


def error_bounds(joint: DiscreteJoint, subset: Sequence[int]) -> tuple[float, float]:
    """Fano-style lower and Hellman-Raviv-style upper bound on the
    prediction error, both in probability units.

    lower = (H(target) - I - 1) / log2(target_size), with the constant read
    as one bit; returned unclamped, so it may be negative (vacuous).
    upper = (H(target) - I) / 2.
    """
    if joint.target_size < 2:
        raise ValueError("error bounds require a target alphabet of size >= 2")
    h = target_entropy(joint)
    mi = mutual_information(joint, subset)
    lower = (h - mi - 1.0) / math.log2(joint.target_size)
    upper = (h - mi) / 2.0
    return lower, upper


@dataclass(frozen=True)
class ITReport:
    """Information measures for one predictor subset.

    ``mi = relevancy + cond_redundancy - redundancy`` is an exact identity;
    construction enforces it within 1e-9 together with the bound sandwich
    around the MAP error.
    """

    h_target: float
    mi: float
    relevancy: float
    cond_redundancy: float
    redundancy: float
    it_diversity: float
    lower_bound: float
    upper_bound: float
    bayes_error: float

    def __post_init__(self) -> None:
        for name in ("h_target", "mi", "relevancy", "cond_redundancy", "redundancy"):
            if getattr(self, name) < -SIGN_TOL:
                raise ValueError(f"{name} must be non-negative (got {getattr(self, name)!r})")
        if abs(self.mi - (self.relevancy + self.cond_redundancy - self.redundancy)) > IDENTITY_TOL:
            raise ValueError("information decomposition identity violated")
        if not -IDENTITY_TOL <= self.bayes_error <= 1.0 + IDENTITY_TOL:
            raise ValueError(f"bayes_error {self.bayes_error!r} outside [0, 1]")
        if self.lower_bound > self.bayes_error + IDENTITY_TOL:
            raise ValueError("lower bound exceeds the exact error")
        if self.bayes_error > self.upper_bound + IDENTITY_TOL:
            raise ValueError("exact error exceeds the upper bound")

    def metrics(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def decompose_mi(joint: DiscreteJoint, subset: Sequence[int] | None = None) -> ITReport:
    """Full report for one subset (all predictors when subset is None)."""
    s = _check_subset(joint, range(joint.n_vars) if subset is None else subset)
    relevancy = sum(mutual_information(joint, (i,)) for i in s)
    redundancy = total_correlation(joint, s)
    cond_redundancy = conditional_total_correlation(joint, s)
    lower, upper = error_bounds(joint, s)
    return ITReport(
        h_target=target_entropy(joint),
        mi=mutual_information(joint, s),
        relevancy=relevancy,
        cond_redundancy=cond_redundancy,
        redundancy=redundancy,
        it_diversity=cond_redundancy - redundancy,
        lower_bound=lower,
        upper_bound=upper,
        bayes_error=bayes_error(joint, s),
    )


def make_ci_joint(prior, conditionals) -> DiscreteJoint:
    """Build a joint whose predictors are independent given the target.

    ``prior`` is the target pmf; ``conditionals[i]`` is a table of shape
    (target_size, alphabet_i) whose row h is p(x_i | target=h).  The result
    has zero conditional total correlation on every subset by construction.
    """
    prior = np.asarray(prior, dtype=np.float64)
    if prior.ndim != 1:
        raise ValueError("prior must be one-dimensional")
    if np.any(prior < 0) or abs(float(prior.sum()) - 1.0) > 1e-9:
        raise ValueError("prior must be a normalized pmf")
    k = prior.shape[0]
    tables = []
    for i, cond in enumerate(conditionals):
        arr = np.asarray(cond, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != k:
            raise ValueError(
                f"conditional {i} must have shape (target_size, alphabet), got {arr.shape}"
            )
        if np.any(arr < 0) or np.any(np.abs(arr.sum(axis=1) - 1.0) > 1e-9):
            raise ValueError(f"conditional {i} rows must each be a normalized pmf")
        tables.append(arr)
    n = len(tables)
    shape = tuple(t.shape[1] for t in tables) + (k,)
    pmf = np.broadcast_to(prior, shape).copy()
    for i, table in enumerate(tables):
        view_shape = [1] * n + [k]
        view_shape[i] = table.shape[1]
        pmf *= table.T.reshape(view_shape)
    return DiscreteJoint(pmf)


# ---------------------------------------------------------------------------
# Property scanners.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PropertyViolation:
    """One witnessed failure of a diminishing-returns or monotonicity check.

    For modularity checks, ``gain_small``/``gain_large`` are the marginal
    gains of adding ``added`` to ``subset_small`` and ``subset_large``.  For
    monotone checks only the small side is populated.
    """

    function: str
    kind: str
    subset_small: tuple[int, ...]
    subset_large: tuple[int, ...]
    added: int
    gain_small: float
    gain_large: float


@dataclass(frozen=True)
class PropertyCheckReport:
    joint_cells: int
    n_vars: int
    n_modularity_triples: int
    n_monotonicity_pairs: int
    tolerance: float
    violations: tuple[PropertyViolation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations


def _all_subsets(indices: tuple[int, ...]):
    return _chain.from_iterable(combinations(indices, r) for r in range(len(indices) + 1))


def _subset_values(joint: DiscreteJoint, functions: dict) -> dict:
    indices = tuple(range(joint.n_vars))
    values: dict[str, dict[tuple[int, ...], float]] = {name: {} for name in functions}
    for subset in _all_subsets(indices):
        for name, fn in functions.items():
            values[name][subset] = fn(joint, subset)
    return values


def _scan_modularity(
    joint: DiscreteJoint,
    functions: dict,
    tolerance: float,
    max_vars: int,
    submodular: tuple[str, ...] = (),
    supermodular: tuple[str, ...] = (),
    non_decreasing: tuple[str, ...] = (),
    non_increasing: tuple[str, ...] = (),
) -> PropertyCheckReport:
    if joint.n_vars > max_vars:
        raise ValueError(
            f"{joint.n_vars} predictors exceed the enumeration cap of {max_vars}"
        )
    values = _subset_values(joint, functions)
    indices = tuple(range(joint.n_vars))
    violations: list[PropertyViolation] = []
    n_triples = 0
    n_pairs = 0

    for a in indices:
        rest = tuple(i for i in indices if i != a)
        for small in _all_subsets(rest):
            n_pairs += 1
            grown = tuple(sorted(small + (a,)))
            for name in non_decreasing:
                gain = values[name][grown] - values[name][small]
                if gain < -tolerance:
                    violations.append(PropertyViolation(
                        name, "non_decreasing", small, small, a, gain, gain))
            for name in non_increasing:
                gain = values[name][grown] - values[name][small]
                if gain > tolerance:
                    violations.append(PropertyViolation(
                        name, "non_increasing", small, small, a, gain, gain))
        for small in _all_subsets(rest):
            remaining = tuple(i for i in rest if i not in small)
            for extra in _all_subsets(remaining):
                large = tuple(sorted(small + extra))
                if large == small:
                    continue
                n_triples += 1
                grown_small = tuple(sorted(small + (a,)))
                grown_large = tuple(sorted(large + (a,)))
                for name in submodular:
                    gain_small = values[name][grown_small] - values[name][small]
                    gain_large = values[name][grown_large] - values[name][large]
                    if gain_small < gain_large - tolerance:
                        violations.append(PropertyViolation(
                            name, "submodularity", small, large, a, gain_small, gain_large))
                for name in supermodular:
                    gain_small = values[name][grown_small] - values[name][small]
                    gain_large = values[name][grown_large] - values[name][large]
                    if gain_small > gain_large + tolerance:
                        violations.append(PropertyViolation(
                            name, "supermodularity", small, large, a, gain_small, gain_large))

    return PropertyCheckReport(
        joint_cells=joint.pmf.size,
        n_vars=joint.n_vars,
        n_modularity_triples=n_triples,
        n_monotonicity_pairs=n_pairs,
        tolerance=tolerance,
        violations=tuple(violations),
    )


def _it_diversity_value(joint: DiscreteJoint, subset) -> float:
    return conditional_total_correlation(joint, subset) - total_correlation(joint, subset)


def submodularity_check(
    joint: DiscreteJoint, tolerance: float = IDENTITY_TOL, max_vars: int = 4
) -> PropertyCheckReport:
    """Enumerate all (S, T, a) with S subset of T and a outside T, checking
    diminishing marginal gains of the predictor-target information and of the
    information-theoretic diversity, plus monotone growth of the information.

    Every violation is returned with its witness triple.  Both properties are
    guaranteed under conditional independence of the predictors given the
    target; without it they can fail (a parity target is the classic
    counterexample).
    """
    return _scan_modularity(
        joint,
        {"mutual_information": mutual_information, "it_diversity": _it_diversity_value},
        tolerance,
        max_vars,
        submodular=("mutual_information", "it_diversity"),
        non_decreasing=("mutual_information",),
    )


def _lower_bound_value(joint: DiscreteJoint, subset) -> float:
    return error_bounds(joint, subset)[0]


def _upper_bound_value(joint: DiscreteJoint, subset) -> float:
    return error_bounds(joint, subset)[1]


def supermodularity_check(
    joint: DiscreteJoint, tolerance: float = IDENTITY_TOL, max_vars: int = 4
) -> PropertyCheckReport:
    """Same triple enumeration on the two error bounds, expecting them to be
    supermodular and non-increasing as predictors are added."""
    return _scan_modularity(
        joint,
        {"lower_bound": _lower_bound_value, "upper_bound": _upper_bound_value},
        tolerance,
        max_vars,
        supermodular=("lower_bound", "upper_bound"),
        non_increasing=("lower_bound", "upper_bound"),
    )


@dataclass(frozen=True)
class ScanStep:
    """One growth step of a monotonicity scan: the variable added, the report
    for the grown subset, and signed deltas of every tracked measure."""

    added: int | None
    report: ITReport
    deltas: dict[str, float]


def monotonicity_scan(joint: DiscreteJoint, chain: Sequence[int]) -> list[ScanStep]:
    """Track all measures along the growing subsets {c_1}, {c_1, c_2}, ...

    Relevancy, redundancy, and conditional redundancy are monotone here by
    the chain rule; a delta below -1e-12 can only mean an implementation bug,
    so it raises.  No sign is asserted for the information-theoretic
    diversity or the bounds: both can move either way.
    """
    order = [int(i) for i in chain]
    if not order:
        raise ValueError("chain must name at least one predictor")
    if len(set(order)) != len(order):
        raise ValueError("chain must not repeat predictors")
    _check_subset(joint, order)

    steps: list[ScanStep] = []
    previous = decompose_mi(joint, ())
    for k, added in enumerate(order, start=1):
        report = decompose_mi(joint, order[:k])
        deltas = {
            name: report.metrics()[name] - previous.metrics()[name]
            for name in METRIC_NAMES
        }
        for name in ("relevancy", "redundancy", "cond_redundancy"):
            if deltas[name] < -SIGN_TOL:
                raise RuntimeError(
                    f"{name} decreased by {-deltas[name]!r} when adding predictor "
                    f"{added}; chain-rule monotonicity violated"
                )
        steps.append(ScanStep(added=added, report=report, deltas=deltas))
        previous = report
    return steps


def growing_target_scan(joints: Sequence[DiscreteJoint]) -> list[ScanStep]:
    """Raw deltas across a sequence of joints, one per growth step, each with
    its own target alphabet.

    This covers the regime where the target's support grows with the sample
    pool, so no measure is sign-asserted; each step uses the full predictor
    set of its own joint.
    """
    if not joints:
        raise ValueError("growing-target scan requires at least one joint")
    steps: list[ScanStep] = []
    previous: ITReport | None = None
    for joint in joints:
        report = decompose_mi(joint, None)
        if previous is None:
            deltas = {name: 0.0 for name in METRIC_NAMES}
        else:
            deltas = {
                name: report.metrics()[name] - previous.metrics()[name]
                for name in METRIC_NAMES
            }
        steps.append(ScanStep(added=None, report=report, deltas=deltas))
        previous = report
    return steps


# ---------------------------------------------------------------------------
# Serialization.
# ---------------------------------------------------------------------------


def save_joint(stream: IO[str], joint: DiscreteJoint) -> None:
    """Write the dense JSON form: pmf flattened row-major, first predictor
    slowest, target fastest."""
    json.dump(
        {
            "alphabet_sizes": list(joint.alphabet_sizes),
            "target_size": joint.target_size,
            "pmf": [float(v) for v in joint.pmf.ravel(order="C")],
        },
        stream,
    )
    stream.write("\n")


def load_joint(stream: IO[str]) -> DiscreteJoint:
    """Read a joint from JSON: either the dense form written by
    :func:`save_joint` or the conditional-independence form with "prior" and
    "conditionals" keys."""
    obj = json.load(stream)
    if not isinstance(obj, dict):
        raise ValueError("joint JSON must be an object")
    if "prior" in obj:
        if "conditionals" not in obj:
            raise ValueError("conditional-independence form requires 'conditionals'")
        return make_ci_joint(obj["prior"], obj["conditionals"])
    for key in ("alphabet_sizes", "target_size", "pmf"):
        if key not in obj:
            raise ValueError(f"joint JSON missing key {key!r}")
    shape = tuple(int(a) for a in obj["alphabet_sizes"]) + (int(obj["target_size"]),)
    flat = np.asarray(obj["pmf"], dtype=np.float64)
    expected = int(np.prod(shape))
    if flat.size != expected:
        raise ValueError(f"pmf has {flat.size} entries, expected {expected}")
    return DiscreteJoint(flat.reshape(shape, order="C"))
