# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Mirrors pure.py; keep signatures and tie rules in sync."""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, log2

cnp.import_array()


def lasso_cd(xt, y, double lam, int max_iter=1000, double tol=1e-10):
    """Cyclic coordinate descent for (1/2n)||y - Xw||^2 + lam*||w||_1.

    See ctxrec._kernels.pure.lasso_cd for the full contract.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] xt_c = \
        np.ascontiguousarray(xt, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] resid = \
        np.array(y, dtype=np.float64, copy=True)
    cdef Py_ssize_t n_features = xt_c.shape[0]
    cdef Py_ssize_t n_samples = xt_c.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.zeros(n_features)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] col_sq = np.zeros(n_features)
    cdef double thresh = lam * n_samples
    cdef Py_ssize_t i, j, it
    cdef double acc, rho, w_old, w_new, delta, max_delta
    cdef int n_iter = 0

    for j in range(n_features):
        acc = 0.0
        for i in range(n_samples):
            acc += xt_c[j, i] * xt_c[j, i]
        col_sq[j] = acc

    max_delta = 0.0
    for it in range(1, max_iter + 1):
        n_iter = it
        max_delta = 0.0
        for j in range(n_features):
            if col_sq[j] <= 0.0:
                continue
            w_old = w[j]
            acc = 0.0
            for i in range(n_samples):
                acc += xt_c[j, i] * resid[i]
            rho = acc + w_old * col_sq[j]
            if rho > thresh:
                w_new = (rho - thresh) / col_sq[j]
            elif rho < -thresh:
                w_new = (rho + thresh) / col_sq[j]
            else:
                w_new = 0.0
            delta = w_new - w_old
            if delta != 0.0:
                for i in range(n_samples):
                    resid[i] -= delta * xt_c[j, i]
                w[j] = w_new
                if fabs(delta) > max_delta:
                    max_delta = fabs(delta)
        if max_delta <= tol:
            break
    return w, n_iter, max_delta


cdef inline double _entropy_counts(double pos, double n):
    cdef double p, h
    if n <= 0.0:
        return 0.0
    p = pos / n
    h = 0.0
    if p > 0.0:
        h -= p * log2(p)
    if p < 1.0:
        h -= (1.0 - p) * log2(1.0 - p)
    return h


def best_split(values, labels, Py_ssize_t min_leaf=1):
    """Best binary split of one sorted numeric column by gain ratio.

    See ctxrec._kernels.pure.best_split for the full contract.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = \
        np.ascontiguousarray(values, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lab = \
        np.ascontiguousarray(labels, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0]
    if n < 2:
        return -1, 0.0, 0.0
    cdef double total_pos = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        total_pos += lab[i]
    cdef double parent = _entropy_counts(total_pos, <double> n)
    # pass 1: gains for every candidate, their count and positive-gain mean
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gains = np.empty(n - 1)
    cdef double pos_left = 0.0
    cdef double n_left, n_right, pos_right, child, gain, split_info, ratio
    cdef double avg_gain = 0.0
    cdef Py_ssize_t n_positive = 0, first_candidate = -1
    for i in range(n - 1):
        pos_left += lab[i]
        gains[i] = -1.0
        if i + 1 < min_leaf or n - i - 1 < min_leaf:
            continue
        if v[i] >= v[i + 1]:
            continue
        if first_candidate < 0:
            first_candidate = i
        n_left = <double> (i + 1)
        n_right = <double> (n - i - 1)
        pos_right = total_pos - pos_left
        child = (n_left * _entropy_counts(pos_left, n_left)
                 + n_right * _entropy_counts(pos_right, n_right)) / n
        gain = parent - child
        gains[i] = gain
        if gain > 1e-12:
            avg_gain += gain
            n_positive += 1
    if first_candidate < 0:
        return -1, 0.0, 0.0
    if n_positive == 0:
        return first_candidate, 0.0, 0.0
    avg_gain /= n_positive
    # pass 2: best gain ratio among candidates with at least average gain
    cdef double best_gain = 0.0, best_ratio = -INFINITY
    cdef Py_ssize_t best_idx = -1
    for i in range(n - 1):
        gain = gains[i]
        if gain <= 1e-12 or gain < avg_gain - 1e-12:
            continue
        split_info = _entropy_counts(<double> (i + 1), <double> n)
        ratio = gain / split_info if split_info > 0.0 else 0.0
        if ratio > best_ratio:
            best_ratio = ratio
            best_gain = gain
            best_idx = i
    return best_idx, best_gain, best_ratio


def stump_scan(values, y, weights):
    """Best decision stump on one sorted column under weighted 0-1 loss.

    See ctxrec._kernels.pure.stump_scan for the full contract.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = \
        np.ascontiguousarray(values, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yy = \
        np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = \
        np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0]
    if n < 2:
        return -1, 1, 1.0
    cdef double total = 0.0, total_neg = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        total += w[i]
        if yy[i] <= 0.0:
            total_neg += w[i]
    cdef double cum_pos = 0.0, cum_neg = 0.0
    cdef double err_plus, err_minus, err
    cdef double best_err = INFINITY
    cdef Py_ssize_t best_idx = -1
    cdef int best_sign = 1, sign
    for i in range(n - 1):
        if yy[i] > 0.0:
            cum_pos += w[i]
        else:
            cum_neg += w[i]
        if v[i] >= v[i + 1]:
            continue
        err_plus = cum_pos + (total_neg - cum_neg)
        err_minus = total - err_plus
        if err_plus <= err_minus:
            sign = 1
            err = err_plus
        else:
            sign = -1
            err = err_minus
        if err < best_err:
            best_err = err
            best_idx = i
            best_sign = sign
    if best_idx < 0:
        return -1, 1, 1.0
    return best_idx, best_sign, best_err
