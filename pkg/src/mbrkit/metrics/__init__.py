"""Deterministic lexical utility functions and the tabular score adapter.

Built-in metrics tokenize on whitespace only and are pure functions of their
two string arguments.  Externally computed scores (neural metrics run
elsewhere) enter through :class:`TabularUtility`, which serves stored values
keyed either by exact strings or by (hypothesis, reference) index.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Callable

from ._kernels import (
    BACKEND,
    char_ngram_stats,
    clipped_token_overlap,
    word_ngram_stats,
)

__all__ = [
    "BACKEND",
    "UtilityFunction",
    "TabularUtility",
    "ScoreNotFoundError",
    "token_f1",
    "chrf",
    "sentence_bleu",
    "tabular_lookup",
    "get_metric",
    "read_tabular_csv",
    "write_tabular_csv",
]


class ScoreNotFoundError(KeyError):
    """A (hypothesis, reference) pair is missing from a tabular score table."""


@dataclass(frozen=True)
class UtilityFunction:
    """A named, pure (hypothesis, reference) -> score function with an
    optional declared output interval."""

    name: str
    score: Callable[[str, str], float]
    declared_range: tuple[float, float] | None = None

    def __call__(self, hypothesis: str, reference: str) -> float:
        return self.score(hypothesis, reference)


def token_f1(hypothesis: str, reference: str) -> float:
    """F1 over the multiset overlap of whitespace tokens.

    Both strings empty -> 1.0; exactly one empty -> 0.0.
    """
    h_tokens = hypothesis.split()
    r_tokens = reference.split()
    if not h_tokens and not r_tokens:
        return 1.0
    if not h_tokens or not r_tokens:
        return 0.0
    overlap = clipped_token_overlap(h_tokens, r_tokens)
    if overlap == 0:
        return 0.0
    precision = overlap / len(h_tokens)
    recall = overlap / len(r_tokens)
    return 2.0 * precision * recall / (precision + recall)


def chrf(hypothesis: str, reference: str, max_n: int = 6, beta: float = 2.0) -> float:
    """Character n-gram F-score in [0, 100].

    Averages F_beta over orders 1..max_n on whitespace-stripped character
    n-grams with multiset clipping.  Orders where neither string has any
    n-gram are skipped, so identical non-empty strings score 100 regardless
    of length; if every order is empty on both sides the score is 0 by
    convention.  This is the character core only, without the word-n-gram
    extension of the "++" variant.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if beta <= 0:
        raise ValueError("beta must be positive")
    beta_sq = beta * beta
    total = 0.0
    orders = 0
    for match, hyp_total, ref_total in char_ngram_stats(hypothesis, reference, max_n):
        if hyp_total == 0 and ref_total == 0:
            continue
        orders += 1
        if match == 0:
            continue
        precision = match / hyp_total
        recall = match / ref_total
        total += (1.0 + beta_sq) * precision * recall / (beta_sq * precision + recall)
    if orders == 0:
        return 0.0
    return 100.0 * total / orders


def sentence_bleu(hypothesis: str, reference: str, max_n: int = 4) -> float:
    """Sentence BLEU over whitespace tokens with add-one smoothing.

    Geometric mean of modified n-gram precisions times the brevity penalty
    exp(min(0, 1 - |r|/|h|)).  The unigram precision is unsmoothed; higher
    orders use (matches + 1) / (candidates + 1), which makes orders with no
    candidate n-grams contribute a neutral 1.  An empty hypothesis scores 0.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    h_tokens = hypothesis.split()
    r_tokens = reference.split()
    if not h_tokens:
        return 0.0
    log_sum = 0.0
    for n, (match, hyp_total) in enumerate(
        word_ngram_stats(h_tokens, r_tokens, max_n), start=1
    ):
        if n == 1:
            if match == 0:
                return 0.0
            precision = match / hyp_total
        else:
            precision = (match + 1) / (hyp_total + 1)
        log_sum += math.log(precision)
    brevity = math.exp(min(0.0, 1.0 - len(r_tokens) / len(h_tokens)))
    return brevity * math.exp(log_sum / max_n)


@dataclass(frozen=True)
class TabularUtility:
    """Precomputed scores served from a lookup table.

    ``lookup_mode`` is "by_string" (keys are the exact hypothesis/reference
    strings) or "by_index" (keys are positions within one instance).  Missing
    pairs raise; there is no default fill.
    """

    table: dict
    lookup_mode: str = "by_string"
    name: str = "tabular"

    def __post_init__(self) -> None:
        if self.lookup_mode not in ("by_index", "by_string"):
            raise ValueError(f"unknown lookup mode {self.lookup_mode!r}")

    def lookup_cell(self, i: int, j: int, hypothesis: str, reference: str) -> float:
        if self.lookup_mode == "by_index":
            return tabular_lookup(self, i, j)
        return tabular_lookup(self, hypothesis, reference)


def tabular_lookup(utility: TabularUtility, hypothesis, reference) -> float:
    """Return the stored score for a pair, unchanged."""
    try:
        return float(utility.table[(hypothesis, reference)])
    except KeyError:
        raise ScoreNotFoundError(
            f"score not found for pair ({hypothesis!r}, {reference!r})"
        ) from None


_STRING_HEADER = ["hyp", "ref", "score"]
_INDEX_HEADER = ["hyp_index", "ref_index", "score"]


def read_tabular_csv(stream: IO[str]) -> TabularUtility:
    """Load a score table; the header row selects string or index keys."""
    reader = csv.reader(stream)
    try:
        header = [c.strip() for c in next(reader)]
    except StopIteration:
        raise ValueError("empty tabular CSV") from None
    if header == _STRING_HEADER:
        mode = "by_string"
    elif header == _INDEX_HEADER:
        mode = "by_index"
    else:
        raise ValueError(f"unrecognized tabular CSV header: {header!r}")
    table: dict = {}
    for row in reader:
        if not row:
            continue
        if len(row) != 3:
            raise ValueError(f"malformed tabular CSV row: {row!r}")
        if mode == "by_index":
            key = (int(row[0]), int(row[1]))
        else:
            key = (row[0], row[1])
        table[key] = float(row[2])
    return TabularUtility(table=table, lookup_mode=mode)


def write_tabular_csv(stream: IO[str], utility: TabularUtility) -> None:
    writer = csv.writer(stream)
    writer.writerow(_INDEX_HEADER if utility.lookup_mode == "by_index" else _STRING_HEADER)
    for (a, b), score in utility.table.items():
        writer.writerow([a, b, repr(float(score))])


def get_metric(name: str, **kwargs) -> UtilityFunction:
    """Look up a built-in metric by name ("token_f1", "chrf", "bleu")."""
    if name == "token_f1":
        return UtilityFunction("token_f1", token_f1, declared_range=(0.0, 1.0))
    if name == "chrf":
        max_n = int(kwargs.pop("max_n", 6))
        beta = float(kwargs.pop("beta", 2.0))
        if kwargs:
            raise ValueError(f"unknown chrf options: {sorted(kwargs)}")
        return UtilityFunction(
            "chrf",
            lambda h, r: chrf(h, r, max_n=max_n, beta=beta),
            declared_range=(0.0, 100.0),
        )
    if name == "bleu":
        max_n = int(kwargs.pop("max_n", 4))
        if kwargs:
            raise ValueError(f"unknown bleu options: {sorted(kwargs)}")
        return UtilityFunction(
            "bleu",
            lambda h, r: sentence_bleu(h, r, max_n=max_n),
            declared_range=(0.0, 1.0),
        )
    raise ValueError(f"unknown metric {name!r}")
