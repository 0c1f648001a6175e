"""Pure-numpy implementations of the hot kernels.

Fallback used when the compiled extension is unavailable.  Both backends
must produce bit-identical results: Gini gains are derived from integer
class counts through the same sequence of IEEE-754 double operations,
split candidates are scanned in the same order, and ties resolve to the
first strictly better candidate (lowest feature index, then lowest
threshold).
"""

import numpy as np


def best_split(X, y01, sort_idx, member, n_node, pos_node):
    """Find the best Gini split for one tree node.

    X          : (n, m) float64, C-contiguous minipatch.
    y01        : (n,) int32 labels in {0, 1}.
    sort_idx   : (n, m) int32, rows of X argsorted per column.
    member     : (n,) uint8, nonzero for rows belonging to this node.
    n_node     : number of member rows.
    pos_node   : number of positive member rows.

    Returns (feature, threshold, gain); feature is -1 when the node is
    unsplittable (no column has two distinct values).  Zero-gain splits
    are accepted so impure nodes keep splitting toward pure leaves.
    """
    total = float(n_node)
    ppos = float(pos_node) / total
    pneg = float(n_node - pos_node) / total
    gini_parent = 1.0 - ppos * ppos - pneg * pneg

    mask = member.view(np.bool_)
    best_feature = -1
    best_threshold = 0.0
    best_gain = -1.0  # below any real gain, so the first candidate wins

    for j in range(X.shape[1]):
        order = sort_idx[:, j]
        sel = order[mask[order]]
        sv = X[sel, j]
        # Candidate boundaries sit between consecutive distinct values.
        cut = np.nonzero(sv[:-1] < sv[1:])[0]
        if cut.size == 0:
            continue
        prefix_pos = np.cumsum(y01[sel])

        nl = (cut + 1).astype(np.float64)
        pl = prefix_pos[cut].astype(np.float64)
        nr = total - nl
        pr = float(pos_node) - pl
        a = pl / nl
        b = (nl - pl) / nl
        gini_l = 1.0 - a * a - b * b
        c = pr / nr
        d = (nr - pr) / nr
        gini_r = 1.0 - c * c - d * d
        gains = (gini_parent - (nl / total) * gini_l) - (nr / total) * gini_r

        k = int(np.argmax(gains))
        gain = float(gains[k])
        if gain > best_gain:
            lo = float(sv[cut[k]])
            hi = float(sv[cut[k] + 1])
            thr = 0.5 * (lo + hi)
            if not thr < hi:  # midpoint rounded up to hi: fall back to lo
                thr = lo
            best_feature = j
            best_threshold = thr
            best_gain = gain

    return best_feature, best_threshold, best_gain


def apply_tree(feature, threshold, left, right, leaf_label, X):
    """Route every row of X through the tree; return its leaf label (+-1).

    feature/left/right are int32 node arrays (-1 marks a leaf in
    ``feature``), threshold float64, leaf_label int8.  X is (rows, m)
    float64, C-contiguous.
    """
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    active = feature[node] >= 0
    while active.any():
        idx = node[active]
        vals = X[rows[active], feature[idx]]
        node[active] = np.where(vals <= threshold[idx], left[idx], right[idx])
        active = feature[node] >= 0
    return leaf_label[node]
