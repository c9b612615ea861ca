# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled segment-marking kernel: the hot inner loop of the segmented sieve.

Contract identical to primerace._kernels.pure.mark_odd_flags; the two are
compared flag-for-flag in the test suite and in benchmarks/bench_kernels.py.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def mark_odd_flags(long long lo_odd, long long count, cnp.int64_t[::1] base_primes):
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] flags_arr = np.ones(count, dtype=np.uint8)
    cdef cnp.uint8_t[::1] flags = flags_arr
    cdef long long hi = lo_odd + 2 * count
    cdef long long p, start, j
    cdef Py_ssize_t i, nb = base_primes.shape[0]

    for i in range(nb):
        p = base_primes[i]
        start = p * p
        if start >= hi:
            break
        if start < lo_odd:
            start = ((lo_odd + p - 1) // p) * p
            if start % 2 == 0:
                start += p
        if start >= hi:
            continue
        j = (start - lo_odd) // 2
        while j < count:
            flags[j] = 0
            j += p
    return flags_arr
