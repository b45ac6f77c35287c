"""Backend selection for the n-gram counting kernels.

Prefers the compiled extension, falls back to the pure-Python twin when the
extension is missing or when ``MBRKIT_PURE_PYTHON=1`` is set.  ``BACKEND``
names the active implementation ("cython" or "python").
"""

from __future__ import annotations

import os

if os.environ.get("MBRKIT_PURE_PYTHON") == "1":
    from . import _ngram_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _ngram_cy as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _ngram_py as _impl  # type: ignore[no-redef]

        BACKEND = "python"

clipped_token_overlap = _impl.clipped_token_overlap
char_ngram_stats = _impl.char_ngram_stats
word_ngram_stats = _impl.word_ngram_stats
