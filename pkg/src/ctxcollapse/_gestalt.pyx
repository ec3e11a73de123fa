# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for gestalt string matching.

Returns the total number of matched characters between two strings under
recursive longest-common-substring matching (longest match first, ties
broken by the smallest start index in ``a``, then in ``b``).  The pure
Python twin lives in ``_gestalt_py`` and must stay behaviourally
identical; ``similarity`` picks one of the two at import time.
"""

from libc.stdlib cimport malloc, free


def match_total(str a, str b):
    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    if la == 0 or lb == 0:
        return 0

    cdef Py_UCS4 *ca = <Py_UCS4 *> malloc(la * sizeof(Py_UCS4))
    cdef Py_UCS4 *cb = <Py_UCS4 *> malloc(lb * sizeof(Py_UCS4))
    # one DP row for longest-common-substring search
    cdef Py_ssize_t *row = <Py_ssize_t *> malloc((lb + 1) * sizeof(Py_ssize_t))
    # explicit stack of (alo, ahi, blo, bhi) quadruples
    cdef Py_ssize_t cap = 4 * (la + lb + 4)
    cdef Py_ssize_t *stack = <Py_ssize_t *> malloc(cap * sizeof(Py_ssize_t))
    if ca == NULL or cb == NULL or row == NULL or stack == NULL:
        free(ca); free(cb); free(row); free(stack)
        raise MemoryError()

    cdef Py_ssize_t i, j, alo, ahi, blo, bhi
    cdef Py_ssize_t best_len, best_i, best_j, cur, top
    cdef Py_ssize_t total = 0

    for i in range(la):
        ca[i] = a[i]
    for j in range(lb):
        cb[j] = b[j]

    top = 0
    stack[top] = 0; stack[top + 1] = la; stack[top + 2] = 0; stack[top + 3] = lb
    top += 4

    try:
        while top > 0:
            top -= 4
            alo = stack[top]; ahi = stack[top + 1]
            blo = stack[top + 2]; bhi = stack[top + 3]
            if alo >= ahi or blo >= bhi:
                continue

            best_len = 0
            best_i = alo
            best_j = blo
            for j in range(blo, bhi + 1):
                row[j] = 0
            for i in range(ahi - 1, alo - 1, -1):
                # row[j] holds the match length starting at (i+1, j+1)
                for j in range(blo, bhi):
                    if ca[i] == cb[j]:
                        cur = row[j + 1] + 1
                    else:
                        cur = 0
                    row[j] = cur
                    if cur > best_len or (cur == best_len and cur > 0
                                          and (i < best_i or (i == best_i and j < best_j))):
                        best_len = cur
                        best_i = i
                        best_j = j
                # shift: make row[] refer to start positions at row i
                # (row already holds starts at i because we overwrote in place)
            if best_len == 0:
                continue
            total += best_len
            if top + 8 > cap:
                raise MemoryError("match stack overflow")
            stack[top] = alo; stack[top + 1] = best_i
            stack[top + 2] = blo; stack[top + 3] = best_j
            top += 4
            stack[top] = best_i + best_len; stack[top + 1] = ahi
            stack[top + 2] = best_j + best_len; stack[top + 3] = bhi
            top += 4
    finally:
        free(ca); free(cb); free(row); free(stack)

    return total
