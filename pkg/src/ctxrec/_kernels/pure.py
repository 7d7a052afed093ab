"""Pure-numpy fallback for the compiled kernels.

Signatures, return conventions and tie-breaking rules must stay in
lockstep with ``_fast.pyx``.
"""

import numpy as np


def lasso_cd(xt, y, lam, max_iter=1000, tol=1e-10):
    """Cyclic coordinate descent for (1/2n)||y - Xw||^2 + lam*||w||_1.

    xt is the transposed design matrix, shape (n_features, n_samples);
    the caller is responsible for centering/scaling columns of X and for
    centering y (the intercept is handled outside).

    Returns (w, n_iter, last_max_delta).  Convergence is declared when the
    largest coordinate move in a full sweep is <= tol.
    """
    xt = np.ascontiguousarray(xt, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n_features, n_samples = xt.shape
    w = np.zeros(n_features)
    col_sq = np.einsum("ij,ij->i", xt, xt)
    resid = y.copy()
    thresh = lam * n_samples
    n_iter = 0
    max_delta = 0.0
    for n_iter in range(1, max_iter + 1):
        max_delta = 0.0
        for j in range(n_features):
            if col_sq[j] <= 0.0:
                continue
            xj = xt[j]
            w_old = w[j]
            rho = xj @ resid + w_old * col_sq[j]
            if rho > thresh:
                w_new = (rho - thresh) / col_sq[j]
            elif rho < -thresh:
                w_new = (rho + thresh) / col_sq[j]
            else:
                w_new = 0.0
            delta = w_new - w_old
            if delta != 0.0:
                resid -= delta * xj
                w[j] = w_new
                if abs(delta) > max_delta:
                    max_delta = abs(delta)
        if max_delta <= tol:
            break
    return w, n_iter, max_delta


def _entropy_counts(pos, n):
    """Binary entropy from counts, elementwise, with 0*log2(0) == 0."""
    pos = np.asarray(pos, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(n > 0, pos / n, 0.0)
        q = 1.0 - p
        hp = np.where(p > 0, -p * np.log2(p, where=p > 0), 0.0)
        hq = np.where(q > 0, -q * np.log2(q, where=q > 0), 0.0)
    return hp + hq


def best_split(values, labels, min_leaf=1):
    """Best binary split of one numeric column by gain ratio.

    values must be sorted ascending and labels (0/1) aligned with it.
    A split at index i sends rows [0..i] left and [i+1..] right; the
    threshold is the midpoint of values[i] and values[i+1], computed by
    the caller.  Candidates exist only between distinct values and must
    leave at least min_leaf rows on each side.

    Candidates whose information gain is positive compete by gain ratio,
    restricted to those with at least the average gain (the classic guard
    against near-trivial cuts with tiny split info).  When no candidate
    has positive gain the first candidate is returned with gain 0, so an
    impure node can still be carved (parity structures have zero gain at
    the root); the caller decides whether to use it.

    Returns (split_idx, gain, gain_ratio); split_idx == -1 when the
    column admits no candidate at all.  Ties go to the smallest index.
    """
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels)
    n = values.shape[0]
    if n < 2:
        return -1, 0.0, 0.0
    cut = np.nonzero(values[:-1] < values[1:])[0]
    cut = cut[(cut + 1 >= min_leaf) & (n - cut - 1 >= min_leaf)]
    if cut.size == 0:
        return -1, 0.0, 0.0
    pos_cum = np.cumsum(labels, dtype=np.float64)
    total_pos = pos_cum[-1]
    parent = _entropy_counts(total_pos, n)

    n_left = (cut + 1).astype(np.float64)
    n_right = n - n_left
    pos_left = pos_cum[cut]
    pos_right = total_pos - pos_left
    child = (n_left * _entropy_counts(pos_left, n_left)
             + n_right * _entropy_counts(pos_right, n_right)) / n
    gain = parent - child
    positive = gain > 1e-12
    if not np.any(positive):
        return int(cut[0]), 0.0, 0.0
    avg_gain = gain[positive].mean()
    split_info = _entropy_counts(n_left, float(n))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(split_info > 0, gain / split_info, 0.0)
    ratio = np.where(positive & (gain >= avg_gain - 1e-12), ratio, -np.inf)
    best = int(np.argmax(ratio))
    return int(cut[best]), float(gain[best]), float(ratio[best])


def stump_scan(values, y, weights):
    """Best decision stump on one sorted column under weighted 0-1 loss.

    values ascending, y in {-1.0, +1.0}, weights nonnegative and summing
    to 1.  The stump predicts ``sign`` for x > threshold and ``-sign``
    otherwise, with the threshold between index i and i+1.

    Returns (split_idx, sign, error).  split_idx == -1 for a constant
    column.  Ties prefer the smallest index, then sign +1.
    """
    values = np.asarray(values, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    n = values.shape[0]
    if n < 2:
        return -1, 1, 1.0
    cut = np.nonzero(values[:-1] < values[1:])[0]
    if cut.size == 0:
        return -1, 1, 1.0
    wpos = np.where(y > 0, weights, 0.0)
    wneg = weights - wpos
    cum_pos = np.cumsum(wpos)
    cum_neg = np.cumsum(wneg)
    total_neg = cum_neg[-1]
    total = cum_pos[-1] + total_neg
    # sign +1: wrong on positives left of the cut and negatives right of it
    err_plus = cum_pos[cut] + (total_neg - cum_neg[cut])
    err_minus = total - err_plus
    sign = np.where(err_plus <= err_minus, 1, -1)
    err = np.minimum(err_plus, err_minus)
    best = int(np.argmin(err))
    return int(cut[best]), int(sign[best]), float(err[best])
