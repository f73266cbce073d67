# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the kernels in ``_kernels_py``; same signatures."""

from libc.stdlib cimport malloc, free
from libc.stdint cimport uint64_t


def enumerate_assignments(domains, checks):
    cdef Py_ssize_t n = len(domains)
    if n == 0:
        return [()]
    cdef Py_ssize_t nchecks = 0, ntab = 0, s, c
    for s in range(n):
        for t, table in checks[s]:
            nchecks += 1
            ntab += len(table)
    cdef int *dom = <int *> malloc(n * sizeof(int))
    cdef int *off = <int *> malloc((n + 1) * sizeof(int))
    cdef int *cslot = <int *> malloc((nchecks + 1) * sizeof(int))
    cdef int *toff = <int *> malloc((nchecks + 1) * sizeof(int))
    cdef int *tables = <int *> malloc((ntab + 1) * sizeof(int))
    cdef int *vals = <int *> malloc(n * sizeof(int))
    cdef int *cur = <int *> malloc(n * sizeof(int))
    cdef int ci = 0, ti = 0, y, d
    cdef bint ok
    out = []
    try:
        for s in range(n):
            dom[s] = domains[s]
            off[s] = ci
            for t, table in checks[s]:
                cslot[ci] = t
                toff[ci] = ti
                for v in table:
                    tables[ti] = v
                    ti += 1
                ci += 1
        off[n] = ci
        s = 0
        cur[0] = -1
        while s >= 0:
            if s == n:
                out.append(tuple([vals[i] for i in range(n)]))
                s -= 1
                continue
            y = cur[s] + 1
            d = dom[s]
            while y < d:
                ok = True
                for c in range(off[s], off[s + 1]):
                    if tables[toff[c] + y] != vals[cslot[c]]:
                        ok = False
                        break
                if ok:
                    break
                y += 1
            if y < d:
                cur[s] = y
                vals[s] = y
                s += 1
                if s < n:
                    cur[s] = -1
            else:
                s -= 1
    finally:
        free(dom); free(off); free(cslot); free(toff); free(tables); free(vals); free(cur)
    return out


def enumerate_downsets(order, strict_below):
    cdef Py_ssize_t n = len(order)
    if n > 63:
        from ._kernels_py import enumerate_downsets as slow
        return slow(order, strict_below)
    cdef uint64_t below[64]
    cdef uint64_t bit[64]
    cdef uint64_t mask_at[65]
    cdef int state[65]
    cdef Py_ssize_t i
    for i in range(n):
        below[i] = strict_below[i]
        bit[i] = (<uint64_t> 1) << (<int> order[i])
    out = []
    # state[i]: 0 = try exclude next, 1 = try include next, 2 = exhausted
    i = 0
    mask_at[0] = 0
    state[0] = 0
    while i >= 0:
        if i == n:
            out.append(mask_at[n])
            i -= 1
            continue
        if state[i] == 0:
            state[i] = 1
            mask_at[i + 1] = mask_at[i]
            state[i + 1] = 0
            i += 1
        elif state[i] == 1:
            state[i] = 2
            if below[i] & ~mask_at[i] == 0:
                mask_at[i + 1] = mask_at[i] | bit[i]
                state[i + 1] = 0
                i += 1
        else:
            i -= 1
    return out
