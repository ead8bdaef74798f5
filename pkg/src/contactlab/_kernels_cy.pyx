# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot numeric kernels.

Same surface as contactlab._kernels_py; see that module for the shape
conventions.  Selected automatically by contactlab._backend when built.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def firing_exponents(double[:, ::1] X, double[:, ::1] C, double[:, ::1] S):
    cdef Py_ssize_t N = X.shape[0], M = C.shape[0], n = C.shape[1]
    cdef Py_ssize_t i, k, j
    cdef double acc, d
    out_arr = np.empty((N, M))
    cdef double[:, ::1] out = out_arr
    for i in range(N):
        for k in range(M):
            acc = 0.0
            for j in range(n):
                d = X[i, j] - C[k, j]
                acc += d * d / (2.0 * S[k, j] * S[k, j])
            out[i, k] = -acc
    return out_arr


def premise_grad_sums(double[:, ::1] X, double[:, ::1] C, double[:, ::1] S,
                      double[:, ::1] Wbar, double[:, ::1] F,
                      double[::1] Y, double[::1] R):
    cdef Py_ssize_t N = X.shape[0], M = C.shape[0], n = C.shape[1]
    cdef Py_ssize_t i, k, j
    cdef double a, d, s
    gc_arr = np.zeros((M, n))
    gs_arr = np.zeros((M, n))
    cdef double[:, ::1] gc = gc_arr
    cdef double[:, ::1] gs = gs_arr
    for i in range(N):
        for k in range(M):
            a = R[i] * Wbar[i, k] * (F[i, k] - Y[i])
            for j in range(n):
                d = X[i, j] - C[k, j]
                s = S[k, j]
                gc[k, j] += a * d / (s * s)
                gs[k, j] += a * d * d / (s * s * s)
    return gc_arr, gs_arr


def batch_winner(double[:, ::1] W, double[:, ::1] X):
    cdef Py_ssize_t Q = W.shape[0], N = X.shape[0], d = W.shape[1]
    cdef Py_ssize_t i, q, j, best
    cdef double acc, diff, bestd
    out_arr = np.empty(N, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    for i in range(N):
        best = 0
        bestd = 0.0
        for q in range(Q):
            acc = 0.0
            for j in range(d):
                diff = X[i, j] - W[q, j]
                acc += diff * diff
            if q == 0 or acc < bestd:
                bestd = acc
                best = q
        out[i] = best
    return out_arr


def som_train(double[:, ::1] W, double[:, ::1] X, cnp.int64_t[:, ::1] orders,
              double[::1] lrs, double[::1] radii,
              double[::1] gi, double[::1] gj):
    cdef Py_ssize_t E = orders.shape[0], N = orders.shape[1]
    cdef Py_ssize_t Q = W.shape[0], d = W.shape[1]
    cdef Py_ssize_t e, s, q, j, best, idx
    cdef double lr, r2, acc, diff, bestd, gd2, a
    for e in range(E):
        lr = lrs[e]
        r2 = 2.0 * radii[e] * radii[e]
        for s in range(N):
            idx = orders[e, s]
            best = 0
            bestd = 0.0
            for q in range(Q):
                acc = 0.0
                for j in range(d):
                    diff = X[idx, j] - W[q, j]
                    acc += diff * diff
                if q == 0 or acc < bestd:
                    bestd = acc
                    best = q
            for q in range(Q):
                gd2 = (gi[q] - gi[best]) ** 2 + (gj[q] - gj[best]) ** 2
                a = lr * exp(-gd2 / r2)
                for j in range(d):
                    W[q, j] += a * (X[idx, j] - W[q, j])


def subclust_potentials(double[:, ::1] Z, double alpha):
    cdef Py_ssize_t N = Z.shape[0], n = Z.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc, d2, diff
    out_arr = np.empty(N)
    cdef double[::1] out = out_arr
    for i in range(N):
        acc = 0.0
        for j in range(N):
            d2 = 0.0
            for k in range(n):
                diff = Z[i, k] - Z[j, k]
                d2 += diff * diff
            acc += exp(-alpha * d2)
        out[i] = acc
    return out_arr
