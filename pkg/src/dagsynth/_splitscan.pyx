# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled split-scan kernel. Mirrors ``_scan_py.scan_splits`` exactly;
see that module for the scoring definition."""

import numpy as np

cimport numpy as cnp
from libc.math cimport lgamma, log

cnp.import_array()

BACKEND_NAME = "compiled"


cdef double _log_ml(double[:] cnt, Py_ssize_t k, double a0) nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0, n = 0.0
    for i in range(k):
        s += lgamma(a0 + cnt[i])
        n += cnt[i]
    return s - k * lgamma(a0) + lgamma(k * a0) - lgamma(k * a0 + n)


def dm_log_marginal(counts, double alpha0):
    cdef double[:] c = np.ascontiguousarray(counts, dtype=np.float64)
    return _log_ml(c, c.shape[0], alpha0)


def scan_splits(y, X, int k_y, k_feats, double alpha_prior,
                double lam_unsup, double lam_div, int min_leaf):
    cdef long[:, :] Xv = np.ascontiguousarray(X, dtype=np.int64)
    cdef long[:] yv = np.ascontiguousarray(y, dtype=np.int64)
    cdef long[:] kf = np.ascontiguousarray(k_feats, dtype=np.int64)
    cdef Py_ssize_t n = Xv.shape[0], p = Xv.shape[1]
    cdef double a0 = alpha_prior
    cdef double lg_a0 = lgamma(a0)
    cdef Py_ssize_t i, j, j2, t, b, c, kj, kj2, k_max

    cdef cnp.ndarray[double, ndim=1] class_counts = np.zeros(k_y)
    cdef double[:] cc = class_counts
    for i in range(n):
        cc[yv[i]] += 1.0

    k_max = 0
    for j in range(p):
        if kf[j] > k_max:
            k_max = kf[j]

    cdef double[:, :] fhv = np.zeros((p, max(k_max, 1)))
    for i in range(n):
        for j in range(p):
            fhv[j, Xv[i, j]] += 1.0

    cdef double baseline = _log_ml(cc, k_y, a0)
    for j in range(p):
        baseline += lam_unsup * _log_ml(fhv[j, :kf[j]], kf[j], a0)

    cdef cnp.ndarray[double, ndim=1] parent_p = (class_counts + a0) / (n + k_y * a0)
    cdef double[:] pp = parent_p
    cdef double[:] lpp = np.log(parent_p)

    cdef int best_j = -1, best_t = -1
    cdef double best_score = -np.inf

    cdef double[:, :] joint
    cdef double[:, :, :] cross
    cdef double[:, :] runh
    cdef double[:] left_c = np.zeros(k_y)
    cdef double[:] rc = np.zeros(k_y)
    cdef double[:] left_h = np.zeros(max(k_max, 1))
    cdef double[:] rh = np.zeros(max(k_max, 1))
    cdef double nl, nr, sup, unsup, kl_l, kl_r, score, pl_k, pr_k
    cdef double g_sum, cg_run, sizes_l, sizes_r, own_left, own_right, own_side

    for j in range(p):
        kj = kf[j]
        if kj < 2:
            continue
        joint = np.zeros((kj, k_y))
        cross = np.zeros((p, kj, k_max))
        for i in range(n):
            b = Xv[i, j]
            joint[b, yv[i]] += 1.0
            for j2 in range(p):
                if j2 != j:
                    cross[j2, b, Xv[i, j2]] += 1.0

        g_sum = 0.0
        for c in range(kj):
            g_sum += lgamma(a0 + fhv[j, c])

        runh = np.zeros((p, k_max))
        for c in range(k_y):
            left_c[c] = 0.0
        nl = 0.0
        cg_run = 0.0

        for t in range(kj - 1):
            for c in range(k_y):
                left_c[c] += joint[t, c]
                nl += joint[t, c]
            cg_run += lgamma(a0 + fhv[j, t])
            for j2 in range(p):
                if j2 == j:
                    continue
                kj2 = kf[j2]
                for c in range(kj2):
                    runh[j2, c] += cross[j2, t, c]
            nr = n - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            for c in range(k_y):
                rc[c] = cc[c] - left_c[c]
            sup = _log_ml(left_c, k_y, a0) + _log_ml(rc, k_y, a0)

            # split feature: side membership + per-side Dirichlet on own support
            sizes_l = t + 1.0
            sizes_r = kj - t - 1.0
            own_left = cg_run - sizes_l * lg_a0 + lgamma(sizes_l * a0) \
                - lgamma(sizes_l * a0 + nl)
            own_right = (g_sum - cg_run) - sizes_r * lg_a0 + lgamma(sizes_r * a0) \
                - lgamma(sizes_r * a0 + nr)
            own_side = lgamma(a0 + nl) + lgamma(a0 + nr) - 2.0 * lg_a0 \
                + lgamma(2.0 * a0) - lgamma(2.0 * a0 + n)
            unsup = own_left + own_right + own_side

            for j2 in range(p):
                if j2 == j:
                    continue
                kj2 = kf[j2]
                for c in range(kj2):
                    left_h[c] = runh[j2, c]
                    rh[c] = fhv[j2, c] - runh[j2, c]
                unsup += _log_ml(left_h[:kj2], kj2, a0) + _log_ml(rh[:kj2], kj2, a0)

            kl_l = 0.0
            kl_r = 0.0
            for c in range(k_y):
                pl_k = (left_c[c] + a0) / (nl + k_y * a0)
                pr_k = (rc[c] + a0) / (nr + k_y * a0)
                kl_l += (pl_k - pp[c]) * (log(pl_k) - lpp[c])
                kl_r += (pr_k - pp[c]) * (log(pr_k) - lpp[c])

            score = sup + lam_unsup * unsup + lam_div * ((nl / n) * kl_l + (nr / n) * kl_r)
            if score > best_score:
                best_j = <int> j
                best_t = <int> t
                best_score = score

    return best_j, best_t, best_score, baseline
