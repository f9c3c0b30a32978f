"""Pure-Python implementations of the kernel routines.

Used when the compiled extension is unavailable; semantics are identical,
speed is not (see benchmarks/bench_kernels.py).
"""

import numpy as np


def edit_costs(ref, hyp):
    """Minimal edit cost between token id sequences, plus the maximum
    substitution count over all minimal-cost alignments.

    Returns ``(total_cost, substitutions)``.
    """
    ref = list(ref)
    hyp = list(hyp)
    m = len(hyp)
    cost_prev = list(range(m + 1))
    subs_prev = [0] * (m + 1)
    for i, r_tok in enumerate(ref, start=1):
        cost_cur = [i] + [0] * m
        subs_cur = [0] * (m + 1)
        for j in range(1, m + 1):
            if r_tok == hyp[j - 1]:
                c_best = cost_prev[j - 1]
                s_best = subs_prev[j - 1]
            else:
                c_best = cost_prev[j - 1] + 1
                s_best = subs_prev[j - 1] + 1
            c_ins = cost_cur[j - 1] + 1
            if c_ins < c_best or (c_ins == c_best and subs_cur[j - 1] > s_best):
                c_best = c_ins
                s_best = subs_cur[j - 1]
            c_del = cost_prev[j] + 1
            if c_del < c_best or (c_del == c_best and subs_prev[j] > s_best):
                c_best = c_del
                s_best = subs_prev[j]
            cost_cur[j] = c_best
            subs_cur[j] = s_best
        cost_prev, subs_prev = cost_cur, subs_cur
    return cost_prev[m], subs_prev[m]


def smooth_rows_inplace(bits, threshold):
    """Fill every white run strictly shorter than ``threshold`` that lies
    between two black pixels of the same row. Border runs stay white.
    """
    for row in bits:
        idx = np.flatnonzero(row)
        if idx.size < 2:
            continue
        diffs = np.diff(idx)
        # diff == gap + 1, so 0 < gap < threshold  <=>  1 < diff <= threshold
        for k in np.nonzero((diffs > 1) & (diffs <= threshold))[0]:
            row[idx[k] + 1 : idx[k + 1]] = 1
