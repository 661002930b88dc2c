# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; must stay bit-identical to `_pure`."""

from array import array

from libc.stdlib cimport free, malloc

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define POPCNT64(x) __builtin_popcountll(x)
    #else
    static int POPCNT64(unsigned long long x) {
        int c = 0;
        while (x) { x &= x - 1; c++; }
        return c;
    }
    #endif
    """
    int POPCNT64(unsigned long long x) nogil

cdef inline unsigned long long c_mix64(unsigned long long h,
                                       unsigned long long v) nogil:
    h = (h ^ v) * 0xFF51AFD7ED558CCDULL
    return h ^ (h >> 33)


def mix64(h, v):
    return c_mix64(<unsigned long long> h, <unsigned long long> v)


def hash64(values):
    cdef unsigned long long h = 0x9E3779B97F4A7C15ULL
    for v in values:
        h = c_mix64(h, <unsigned long long> (v & 0xFFFFFFFFFFFFFFFF))
    return h


def morgan_round(codes, starts, nbr_idx, bond_keys):
    cdef unsigned long long[:] c = codes
    cdef unsigned int[:] s = starts
    cdef unsigned int[:] nb = nbr_idx
    cdef unsigned char[:] bk = bond_keys
    out = array("Q", codes)
    cdef unsigned long long[:] o = out
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t i, k, j, m
    cdef unsigned long long h, t
    cdef unsigned long long buf[64]
    cdef unsigned long long *heap
    cdef unsigned long long *work
    for i in range(n):
        m = s[i + 1] - s[i]
        if m == 0:
            continue
        if m <= 64:
            work = buf
            heap = NULL
        else:
            heap = <unsigned long long *> malloc(m * sizeof(unsigned long long))
            work = heap
        for k in range(m):
            work[k] = c_mix64(c[nb[s[i] + k]], bk[s[i] + k])
        # insertion sort: neighbor lists are tiny
        for k in range(1, m):
            t = work[k]
            j = k
            while j > 0 and work[j - 1] > t:
                work[j] = work[j - 1]
                j -= 1
            work[j] = t
        h = c[i]
        for k in range(m):
            h = c_mix64(h, work[k])
        o[i] = h
        if heap != NULL:
            free(heap)
    return out


def popcount_words(words):
    cdef unsigned long long[:] w = words
    cdef Py_ssize_t i
    cdef long total = 0
    for i in range(w.shape[0]):
        total += POPCNT64(w[i])
    return total


def and_or_counts(a, b):
    cdef unsigned long long[:] x = a
    cdef unsigned long long[:] y = b
    cdef Py_ssize_t i
    cdef long n_and = 0, n_or = 0
    for i in range(x.shape[0]):
        n_and += POPCNT64(x[i] & y[i])
        n_or += POPCNT64(x[i] | y[i])
    return n_and, n_or
