# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled enumeration kernels. ``ghzforge._fallback`` mirrors every function."""

import numpy as np

from libc.math cimport cos, M_PI
from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free

BACKEND = "compiled"


cdef inline void _set_digits(int64_t index, int d, Py_ssize_t nvar, int64_t* digits) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(nvar - 1, -1, -1):
        digits[i] = index % d
        index = index // d


def lhv_count(const int64_t[:, ::1] coef_t, const int64_t[::1] targets, int d,
              int64_t start, int64_t stop, bint stop_at_first):
    """Count counter values in ``[start, stop)`` whose assignment satisfies every row.

    ``coef_t`` is (variables x constraints), already reduced mod d; variable 0
    is the most significant digit. Returns ``(count, first, scanned)`` with
    ``first = -1`` when nothing satisfies.
    """
    cdef Py_ssize_t nvar = coef_t.shape[0]
    cdef Py_ssize_t m = coef_t.shape[1]
    cdef int64_t count = 0, first = -1, c, s
    cdef Py_ssize_t i, o
    cdef bint ok
    if stop <= start:
        return 0, -1, 0
    cdef int64_t* digits = <int64_t*> malloc((nvar + 1) * sizeof(int64_t))
    cdef int64_t* sums = <int64_t*> malloc((m + 1) * sizeof(int64_t))
    if digits == NULL or sums == NULL:
        free(digits)
        free(sums)
        raise MemoryError()
    with nogil:
        _set_digits(start, d, nvar, digits)
        for o in range(m):
            s = 0
            for i in range(nvar):
                s += coef_t[i, o] * digits[i]
            sums[o] = s % d
        c = start
        while c < stop:
            ok = True
            for o in range(m):
                if sums[o] != targets[o]:
                    ok = False
                    break
            if ok:
                count += 1
                if first < 0:
                    first = c
                if stop_at_first:
                    c += 1
                    break
            c += 1
            if c >= stop:
                break
            # odometer step; wrapping a digit from d-1 to 0 adds coef (mod d) as well
            i = nvar - 1
            while i >= 0:
                for o in range(m):
                    s = sums[o] + coef_t[i, o]
                    if s >= d:
                        s -= d
                    sums[o] = s
                if digits[i] == d - 1:
                    digits[i] = 0
                    i -= 1
                else:
                    digits[i] += 1
                    break
    free(digits)
    free(sums)
    return count, first, c - start


def bell_max(const int64_t[:, ::1] outer_t, const int64_t[::1] inner_var, int n_inner,
             const int64_t[::1] offsets, const double[::1] weights, int d,
             int64_t start, int64_t stop):
    """Maximize ``sum_o w_o cos(2 pi e_o / d)`` over assignments.

    Outer variables are enumerated over ``[start, stop)``; each term touches at
    most one inner variable, so the inner variables are optimized in closed
    form per outer assignment. Returns ``(best, best_outer, inner_digits)``.
    """
    cdef Py_ssize_t nvar = outer_t.shape[0]
    cdef Py_ssize_t m = outer_t.shape[1]
    cdef Py_ssize_t i, o, v, a
    cdef int64_t c, s, best_outer = -1
    cdef double total, acc, best_v, best = -1e300
    cdef int best_a
    inner_best = np.zeros(n_inner, dtype=np.int64)
    cdef int64_t[::1] inner_best_v = inner_best
    if stop <= start:
        return best, best_outer, inner_best
    cdef int64_t* digits = <int64_t*> malloc((nvar + 1) * sizeof(int64_t))
    cdef int64_t* sums = <int64_t*> malloc((m + 1) * sizeof(int64_t))
    cdef int64_t* choice = <int64_t*> malloc((n_inner + 1) * sizeof(int64_t))
    cdef double* costab = <double*> malloc(d * sizeof(double))
    cdef double* group = <double*> malloc((n_inner * d + 1) * sizeof(double))
    if digits == NULL or sums == NULL or choice == NULL or costab == NULL or group == NULL:
        free(digits); free(sums); free(choice); free(costab); free(group)
        raise MemoryError()
    with nogil:
        for a in range(d):
            costab[a] = cos(2.0 * M_PI * a / d)
        if d == 2:
            costab[0] = 1.0
            costab[1] = -1.0
        elif d == 4:
            costab[0] = 1.0
            costab[1] = 0.0
            costab[2] = -1.0
            costab[3] = 0.0
        _set_digits(start, d, nvar, digits)
        for o in range(m):
            s = offsets[o]
            for i in range(nvar):
                s += outer_t[i, o] * digits[i]
            sums[o] = s % d
        c = start
        while True:
            total = 0.0
            for i in range(n_inner * d):
                group[i] = 0.0
            for o in range(m):
                v = inner_var[o]
                if v < 0:
                    total += weights[o] * costab[sums[o]]
                else:
                    for a in range(d):
                        group[v * d + a] += weights[o] * costab[(sums[o] + a) % d]
            for v in range(n_inner):
                best_v = group[v * d]
                best_a = 0
                for a in range(1, d):
                    if group[v * d + a] > best_v:
                        best_v = group[v * d + a]
                        best_a = a
                total += best_v
                choice[v] = best_a
            if total > best:
                best = total
                best_outer = c
                for v in range(n_inner):
                    inner_best_v[v] = choice[v]
            c += 1
            if c >= stop:
                break
            i = nvar - 1
            while i >= 0:
                for o in range(m):
                    s = sums[o] + outer_t[i, o]
                    if s >= d:
                        s -= d
                    sums[o] = s
                if digits[i] == d - 1:
                    digits[i] = 0
                    i -= 1
                else:
                    digits[i] += 1
                    break
    free(digits); free(sums); free(choice); free(costab); free(group)
    return best, best_outer, inner_best
