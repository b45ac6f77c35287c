# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled n-gram counting kernels.

Mirrors ``_ngram_py`` exactly: same signatures, same integer outputs.  The
speedup comes from compiling the slicing/counting loops; all floating-point
scoring stays in shared Python code so both backends agree bit for bit.
"""


def clipped_token_overlap(list hyp_tokens, list ref_tokens):
    cdef dict h_counts = {}
    cdef dict r_counts = {}
    cdef Py_ssize_t i
    cdef long match = 0
    cdef long hc, rc
    if not hyp_tokens or not ref_tokens:
        return 0
    for i in range(len(hyp_tokens)):
        tok = hyp_tokens[i]
        h_counts[tok] = <long>h_counts.get(tok, 0) + 1
    for i in range(len(ref_tokens)):
        tok = ref_tokens[i]
        r_counts[tok] = <long>r_counts.get(tok, 0) + 1
    for tok, count in h_counts.items():
        hc = <long>count
        rc = <long>r_counts.get(tok, 0)
        if rc:
            match += hc if hc < rc else rc
    return match


def char_ngram_stats(str hyp, str ref, int max_n):
    cdef str h = "".join(hyp.split())
    cdef str r = "".join(ref.split())
    cdef Py_ssize_t len_h = len(h)
    cdef Py_ssize_t len_r = len(r)
    cdef Py_ssize_t i, n
    cdef long match, hc, rc
    cdef dict h_counts, r_counts
    cdef list stats = []
    for n in range(1, max_n + 1):
        h_counts = {}
        for i in range(len_h - n + 1):
            gram = h[i:i + n]
            h_counts[gram] = <long>h_counts.get(gram, 0) + 1
        r_counts = {}
        for i in range(len_r - n + 1):
            gram = r[i:i + n]
            r_counts[gram] = <long>r_counts.get(gram, 0) + 1
        match = 0
        if h_counts and r_counts:
            for gram, count in h_counts.items():
                hc = <long>count
                rc = <long>r_counts.get(gram, 0)
                if rc:
                    match += hc if hc < rc else rc
        stats.append((
            match,
            len_h - n + 1 if len_h - n + 1 > 0 else 0,
            len_r - n + 1 if len_r - n + 1 > 0 else 0,
        ))
    return stats


def word_ngram_stats(list hyp_tokens, list ref_tokens, int max_n):
    cdef Py_ssize_t len_h = len(hyp_tokens)
    cdef Py_ssize_t len_r = len(ref_tokens)
    cdef Py_ssize_t i, n
    cdef long match, hc, rc
    cdef dict h_counts, r_counts
    cdef list stats = []
    for n in range(1, max_n + 1):
        h_counts = {}
        for i in range(len_h - n + 1):
            gram = tuple(hyp_tokens[i:i + n])
            h_counts[gram] = <long>h_counts.get(gram, 0) + 1
        r_counts = {}
        for i in range(len_r - n + 1):
            gram = tuple(ref_tokens[i:i + n])
            r_counts[gram] = <long>r_counts.get(gram, 0) + 1
        match = 0
        for gram, count in h_counts.items():
            hc = <long>count
            rc = <long>r_counts.get(gram, 0)
            if rc:
                match += hc if hc < rc else rc
        stats.append((match, len_h - n + 1 if len_h - n + 1 > 0 else 0))
    return stats
