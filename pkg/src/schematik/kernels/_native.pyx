# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: edit-distance DP and run-length smoothing."""

import numpy as np

cimport numpy as cnp


def edit_costs(cnp.int32_t[::1] ref, cnp.int32_t[::1] hyp):
    """Minimal edit cost between token id sequences, plus the maximum
    substitution count over all minimal-cost alignments.

    Returns ``(total_cost, substitutions)``.
    """
    cdef Py_ssize_t n = ref.shape[0]
    cdef Py_ssize_t m = hyp.shape[0]
    cdef cnp.int64_t[::1] cost_prev = np.arange(m + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] cost_cur = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] subs_prev = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] subs_cur = np.zeros(m + 1, dtype=np.int64)
    cdef Py_ssize_t i, j
    cdef cnp.int64_t c_diag, s_diag, c_del, s_del, c_ins, s_ins, c_best, s_best
    cdef cnp.int32_t r_tok

    for i in range(1, n + 1):
        r_tok = ref[i - 1]
        cost_cur[0] = i
        subs_cur[0] = 0
        for j in range(1, m + 1):
            if r_tok == hyp[j - 1]:
                c_diag = cost_prev[j - 1]
                s_diag = subs_prev[j - 1]
            else:
                c_diag = cost_prev[j - 1] + 1
                s_diag = subs_prev[j - 1] + 1
            c_del = cost_prev[j] + 1
            s_del = subs_prev[j]
            c_ins = cost_cur[j - 1] + 1
            s_ins = subs_cur[j - 1]
            c_best = c_diag
            s_best = s_diag
            if c_ins < c_best or (c_ins == c_best and s_ins > s_best):
                c_best = c_ins
                s_best = s_ins
            if c_del < c_best or (c_del == c_best and s_del > s_best):
                c_best = c_del
                s_best = s_del
            cost_cur[j] = c_best
            subs_cur[j] = s_best
        cost_prev, cost_cur = cost_cur, cost_prev
        subs_prev, subs_cur = subs_cur, subs_prev

    return cost_prev[m], subs_prev[m]


def smooth_rows_inplace(cnp.uint8_t[:, ::1] bits, Py_ssize_t threshold):
    """Fill every white run strictly shorter than ``threshold`` that lies
    between two black pixels of the same row. Border runs stay white.
    """
    cdef Py_ssize_t h = bits.shape[0]
    cdef Py_ssize_t w = bits.shape[1]
    cdef Py_ssize_t r, c, k, last_black, gap

    for r in range(h):
        last_black = -1
        for c in range(w):
            if bits[r, c]:
                if last_black >= 0:
                    gap = c - last_black - 1
                    if 0 < gap < threshold:
                        for k in range(last_black + 1, c):
                            bits[r, k] = 1
                last_black = c
