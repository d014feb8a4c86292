"""Pure numpy implementations of the enumeration kernels.

Same signatures and results as the compiled ``_kernels`` module; the counter
range is processed in vectorized chunks instead of an odometer loop.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"

CHUNK = 1 << 16


def _digits(start: int, stop: int, d: int, nvar: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, nvar), dtype=np.int64)
    rest = idx.copy()
    for i in range(nvar - 1, -1, -1):
        out[:, i] = rest % d
        rest //= d
    return idx, out


def cos_table(d: int) -> np.ndarray:
    table = np.cos(2 * np.pi * np.arange(d) / d)
    if d % 4 == 0:
        table[d // 4] = table[3 * d // 4] = 0.0
    if d % 2 == 0:
        table[d // 2] = -1.0
    table[0] = 1.0
    return table


def lhv_count(coef_t, targets, d, start, stop, stop_at_first):
    coef_t = np.asarray(coef_t, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.int64)
    nvar = coef_t.shape[0]
    count, first, scanned = 0, -1, 0
    for lo in range(start, stop, CHUNK):
        hi = min(lo + CHUNK, stop)
        idx, digits = _digits(lo, hi, d, nvar)
        sat = np.all((digits @ coef_t) % d == targets, axis=1)
        hits = np.flatnonzero(sat)
        if hits.size:
            if first < 0:
                first = int(idx[hits[0]])
            if stop_at_first:
                return count + 1, first, scanned + int(hits[0]) + 1
            count += int(hits.size)
        scanned += hi - lo
    return count, first, scanned


def bell_max(outer_t, inner_var, n_inner, offsets, weights, d, start, stop):
    outer_t = np.asarray(outer_t, dtype=np.int64)
    inner_var = np.asarray(inner_var, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    weights = np.asarray(weights, dtype=float)
    nvar, m = outer_t.shape
    table = cos_table(d)
    group = np.zeros((m, n_inner))
    group[np.flatnonzero(inner_var >= 0), inner_var[inner_var >= 0]] = 1.0
    free_w = np.where(inner_var < 0, weights, 0.0)
    best, best_outer = -1e300, -1
    inner_best = np.zeros(n_inner, dtype=np.int64)
    for lo in range(start, stop, CHUNK):
        hi = min(lo + CHUNK, stop)
        idx, digits = _digits(lo, hi, d, nvar)
        exps = (digits @ outer_t + offsets) % d
        total = table[exps] @ free_w
        if n_inner:
            # per inner variable and value a: grouped weighted cosines
            vals = np.stack([(table[(exps + a) % d] * weights) @ group for a in range(d)], axis=2)
            choice = np.argmax(vals, axis=2)
            total = total + np.take_along_axis(vals, choice[:, :, None], axis=2)[:, :, 0].sum(axis=1)
        j = int(np.argmax(total))
        if total[j] > best:
            best, best_outer = float(total[j]), int(idx[j])
            if n_inner:
                inner_best = choice[j].astype(np.int64)
    return best, best_outer, inner_best
