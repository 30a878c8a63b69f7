# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for batch log-density evaluation.

These are the two kernels that dominate runtime: the pairwise query x kernel
sum for KDE models and the per-component accumulation for Gaussian mixtures.
Both run a streaming log-sum-exp so memory stays O(component count) instead
of O(queries x components).
"""

from libc.math cimport exp, log, INFINITY

import numpy as np


def kde_log_density(double[:, ::1] queries, double[:, ::1] train,
                    double[::1] inv_bandwidths, double log_norm):
    """Log-density of a product-Gaussian KDE at each query point.

    log_norm collects the terms shared by every kernel: -log(m) minus the
    log bandwidth volume minus (d/2) log(2 pi).
    """
    cdef Py_ssize_t n = queries.shape[0]
    cdef Py_ssize_t m = train.shape[0]
    cdef Py_ssize_t d = queries.shape[1]
    out_arr = np.empty(n, dtype=np.float64)
    scratch_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] scratch = scratch_arr
    cdef Py_ssize_t i, j, c
    cdef double acc, diff, peak, total

    with nogil:
        for i in range(n):
            peak = -INFINITY
            for j in range(m):
                acc = 0.0
                for c in range(d):
                    diff = (queries[i, c] - train[j, c]) * inv_bandwidths[c]
                    acc += diff * diff
                acc = -0.5 * acc
                scratch[j] = acc
                if acc > peak:
                    peak = acc
            if peak == -INFINITY:
                # every kernel underflowed (overflowing squared distances)
                out[i] = -INFINITY
                continue
            total = 0.0
            for j in range(m):
                total += exp(scratch[j] - peak)
            out[i] = peak + log(total) + log_norm
    return out_arr


def mixture_log_density(double[:, ::1] queries, double[:, ::1] means,
                        double[:, :, ::1] chol_inv, double[::1] log_weight_norms):
    """Log-density of a full-covariance Gaussian mixture at each query point.

    chol_inv holds one lower-triangular inverse Cholesky factor per component;
    log_weight_norms holds log(weight) plus the component normalization
    (-inf for zero-weight components).
    """
    cdef Py_ssize_t n = queries.shape[0]
    cdef Py_ssize_t k = means.shape[0]
    cdef Py_ssize_t d = queries.shape[1]
    out_arr = np.empty(n, dtype=np.float64)
    scratch_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] scratch = scratch_arr
    cdef Py_ssize_t i, j, r, c
    cdef double acc, row, peak, total

    with nogil:
        for i in range(n):
            peak = -INFINITY
            for j in range(k):
                if log_weight_norms[j] == -INFINITY:
                    scratch[j] = -INFINITY
                    continue
                acc = 0.0
                for r in range(d):
                    row = 0.0
                    for c in range(r + 1):
                        row += chol_inv[j, r, c] * (queries[i, c] - means[j, c])
                    acc += row * row
                acc = log_weight_norms[j] - 0.5 * acc
                scratch[j] = acc
                if acc > peak:
                    peak = acc
            if peak == -INFINITY:
                out[i] = -INFINITY
                continue
            total = 0.0
            for j in range(k):
                if scratch[j] != -INFINITY:
                    total += exp(scratch[j] - peak)
            out[i] = peak + log(total)
    return out_arr
