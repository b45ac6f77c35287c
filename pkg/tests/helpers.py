"""Shared fixtures-in-spirit: deterministic synthetic corpora and random
structure generators used across test modules."""

from __future__ import annotations

import hashlib

import numpy as np

from mbrkit.core import DecodingInstance, QualityVector, ScoreMatrix
from mbrkit.infotheory import DiscreteJoint, make_ci_joint


def hash01(text: str) -> float:
    """Deterministic uniform-ish value in [0, 1) from a string; stable across
    processes (unlike builtin hash)."""
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2.0**64


def hashed_utility(hypothesis: str, reference: str) -> float:
    """Pure synthetic utility: per-hypothesis base quality plus bounded noise
    that is iid across references."""
    base = hash01("base::" + hypothesis)
    noise = hash01(hypothesis + "##" + reference) - 0.5
    return base + noise


def hypothesis_quality(hypothesis: str) -> float:
    """The noise-free base quality that hashed_utility fluctuates around."""
    return hash01("base::" + hypothesis)


def synthetic_instance(idx: int, n_hyps: int = 8, n_refs: int = 64) -> DecodingInstance:
    hyps = tuple(f"hyp {idx} {k}" for k in range(n_hyps))
    refs = tuple(f"ref {idx} {k}" for k in range(n_refs))
    return DecodingInstance(
        id=f"inst-{idx}",
        hypotheses=hyps,
        pseudo_references=refs,
        human_scores=tuple(hypothesis_quality(h) for h in hyps),
    )


def synthetic_corpus(n_instances: int, n_hyps: int = 8, n_refs: int = 64):
    return [synthetic_instance(i, n_hyps, n_refs) for i in range(n_instances)]


def random_matrix(rng: np.random.Generator, max_dim: int = 8,
                  lo: float = -5.0, hi: float = 5.0) -> ScoreMatrix:
    rows = int(rng.integers(1, max_dim + 1))
    cols = int(rng.integers(1, max_dim + 1))
    return ScoreMatrix(rng.uniform(lo, hi, size=(rows, cols)))


def random_human(rng: np.random.Generator, rows: int,
                 lo: float = -5.0, hi: float = 5.0) -> QualityVector:
    return QualityVector(rng.uniform(lo, hi, size=rows), kind="human")


def random_joint(rng: np.random.Generator, n_max: int = 3,
                 alphabet_max: int = 3, target_max: int = 3) -> DiscreteJoint:
    n = int(rng.integers(1, n_max + 1))
    shape = tuple(int(rng.integers(2, alphabet_max + 1)) for _ in range(n))
    shape += (int(rng.integers(2, target_max + 1)),)
    pmf = rng.random(size=shape)
    return DiscreteJoint(pmf / pmf.sum())


def random_ci_joint(rng: np.random.Generator, n: int = 3,
                    alphabet: int = 2, target: int = 2) -> DiscreteJoint:
    prior = rng.random(target) + 0.05
    prior /= prior.sum()
    conditionals = []
    for _ in range(n):
        table = rng.random((target, alphabet)) + 0.05
        table /= table.sum(axis=1, keepdims=True)
        conditionals.append(table)
    return make_ci_joint(prior, conditionals)
