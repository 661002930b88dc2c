"""Kernel backend selection: compiled extension when available, pure Python
otherwise.  Set MOLBENCH_PURE_PYTHON=1 to force the fallback."""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("MOLBENCH_PURE_PYTHON"):
    _impl = _pure
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _pure
        BACKEND = "python"

MASK64 = _pure.MASK64
HASH_SEED = _pure.HASH_SEED
mix64 = _impl.mix64
hash64 = _impl.hash64
morgan_round = _impl.morgan_round
popcount_words = _impl.popcount_words
and_or_counts = _impl.and_or_counts

pure = _pure
