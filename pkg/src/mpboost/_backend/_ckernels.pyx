# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled split-search and tree-apply kernels.

Same contracts, and bit-identical outputs, as ``_pykernels`` -- that
module is the reference semantics.  Gains are computed from integer class
counts with the exact floating-point expression used there; the build
disables FP contraction so no FMA fusion can perturb the last ulp.
"""

import numpy as np


def best_split(const double[:, ::1] X, const int[::1] y01,
               const int[:, ::1] sort_idx, const unsigned char[::1] member,
               int n_node, int pos_node):
    """Best Gini split over all columns for one node; see _pykernels."""
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t m = X.shape[1]
    cdef double total = <double> n_node
    cdef double ppos = (<double> pos_node) / total
    cdef double pneg = (<double> (n_node - pos_node)) / total
    cdef double gini_parent = 1.0 - ppos * ppos - pneg * pneg

    cdef int best_feature = -1
    cdef double best_threshold = 0.0
    cdef double best_gain = -1.0  # below any real gain, so the first candidate wins

    cdef Py_ssize_t j, i, row
    cdef int seen, pos_seen, nl_i
    cdef double v, prev, lo, hi, thr
    cdef double nl, pl, nr, pr, a, b, c, d, gini_l, gini_r, gain

    for j in range(m):
        seen = 0
        pos_seen = 0
        prev = 0.0
        for i in range(n):
            row = sort_idx[i, j]
            if member[row] == 0:
                continue
            v = X[row, j]
            if seen > 0 and v > prev:
                # boundary between the previous run and this value
                nl = <double> seen
                pl = <double> pos_seen
                nr = total - nl
                pr = (<double> pos_node) - pl
                a = pl / nl
                b = (nl - pl) / nl
                gini_l = 1.0 - a * a - b * b
                c = pr / nr
                d = (nr - pr) / nr
                gini_r = 1.0 - c * c - d * d
                gain = (gini_parent - (nl / total) * gini_l) - (nr / total) * gini_r
                if gain > best_gain:
                    lo = prev
                    hi = v
                    thr = 0.5 * (lo + hi)
                    if not thr < hi:
                        thr = lo
                    best_feature = <int> j
                    best_threshold = thr
                    best_gain = gain
            pos_seen += y01[row]
            seen += 1
            prev = v

    return best_feature, best_threshold, best_gain


def apply_tree(const int[::1] feature, const double[::1] threshold,
               const int[::1] left, const int[::1] right,
               const signed char[::1] leaf_label, const double[:, ::1] X):
    """Route every row of X through the tree; see _pykernels."""
    cdef Py_ssize_t n = X.shape[0]
    out_arr = np.empty(n, dtype=np.int8)
    cdef signed char[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int node
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = leaf_label[node]
    return out_arr
