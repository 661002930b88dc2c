"""Pure-Python reference kernels.

The compiled extension in `_speedups.pyx` implements exactly the same
functions; both must produce bit-identical results (the benchmark and the
test suite compare them).  All hashing is 64-bit with a pinned mixing
constant so fingerprints are stable across platforms and versions.
"""

from __future__ import annotations

from array import array

MASK64 = (1 << 64) - 1
_MIX_MULT = 0xFF51AFD7ED558CCD
HASH_SEED = 0x9E3779B97F4A7C15


def mix64(h: int, v: int) -> int:
    h = ((h ^ v) * _MIX_MULT) & MASK64
    return h ^ (h >> 33)


def hash64(values) -> int:
    h = HASH_SEED
    for v in values:
        h = mix64(h, v & MASK64)
    return h


def morgan_round(codes, starts, nbr_idx, bond_keys):
    """One neighborhood-folding round of circular environment hashing.

    codes: uint64 per atom; starts: CSR offsets (len n+1); nbr_idx/bond_keys:
    flattened neighbor atom indices and bond-type keys.
    """
    n = len(codes)
    out = array("Q", [0]) * 0
    out = array("Q", codes)
    for i in range(n):
        lo, hi = starts[i], starts[i + 1]
        if lo == hi:
            continue
        folded = sorted(mix64(codes[nbr_idx[k]], bond_keys[k])
                        for k in range(lo, hi))
        h = codes[i]
        for t in folded:
            h = mix64(h, t)
        out[i] = h
    return out


def popcount_words(words) -> int:
    return sum(w.bit_count() for w in words)


def and_or_counts(a, b) -> tuple[int, int]:
    n_and = 0
    n_or = 0
    for x, y in zip(a, b):
        n_and += (x & y).bit_count()
        n_or += (x | y).bit_count()
    return n_and, n_or
