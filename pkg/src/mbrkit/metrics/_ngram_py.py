"""Pure-Python n-gram counting kernels.

Reference implementation of the counting layer shared by the lexical metrics.
The compiled twin in ``_ngram_cy`` exposes the same three functions; both
return plain integer counts, so scores computed on top of either backend are
bit-identical.
"""

from __future__ import annotations

from collections import Counter


def clipped_token_overlap(hyp_tokens: list[str], ref_tokens: list[str]) -> int:
    """Multiset intersection size of two token lists."""
    if not hyp_tokens or not ref_tokens:
        return 0
    return sum((Counter(hyp_tokens) & Counter(ref_tokens)).values())


def char_ngram_stats(hyp: str, ref: str, max_n: int) -> list[tuple[int, int, int]]:
    """Per-order character n-gram statistics on whitespace-stripped strings.

    Returns [(matches, hyp_total, ref_total)] for n = 1..max_n, where matches
    is the clipped (multiset) overlap count.
    """
    h = "".join(hyp.split())
    r = "".join(ref.split())
    stats = []
    for n in range(1, max_n + 1):
        h_counts: Counter[str] = Counter(h[i : i + n] for i in range(len(h) - n + 1))
        r_counts: Counter[str] = Counter(r[i : i + n] for i in range(len(r) - n + 1))
        match = 0
        if h_counts and r_counts:
            for gram, count in h_counts.items():
                rc = r_counts.get(gram, 0)
                if rc:
                    match += count if count < rc else rc
        stats.append((match, max(len(h) - n + 1, 0), max(len(r) - n + 1, 0)))
    return stats


def word_ngram_stats(
    hyp_tokens: list[str], ref_tokens: list[str], max_n: int
) -> list[tuple[int, int]]:
    """Per-order clipped word n-gram matches and hypothesis n-gram totals."""
    stats = []
    for n in range(1, max_n + 1):
        h_counts: Counter[tuple[str, ...]] = Counter(
            tuple(hyp_tokens[i : i + n]) for i in range(len(hyp_tokens) - n + 1)
        )
        r_counts: Counter[tuple[str, ...]] = Counter(
            tuple(ref_tokens[i : i + n]) for i in range(len(ref_tokens) - n + 1)
        )
        match = 0
        for gram, count in h_counts.items():
            rc = r_counts.get(gram, 0)
            if rc:
                match += count if count < rc else rc
        stats.append((match, max(len(hyp_tokens) - n + 1, 0)))
    return stats
