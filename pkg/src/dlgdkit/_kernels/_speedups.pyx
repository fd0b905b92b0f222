# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

Contracts are documented in _pyref; this module must agree with it --
bit-for-bit on normal_stream and reg_inc_beta (same libm calls in the
same order), and to numerical working precision on ols_solve (pivoted
Householder QR here versus SVD in the fallback).
"""

from libc.math cimport cos, exp, fabs, lgamma, log, log1p, sin, sqrt
from libc.stdint cimport int64_t, uint64_t

import numpy as np

from dlgdkit.errors import ConvergenceError

cdef uint64_t GAMMA = <uint64_t>0x9E3779B97F4A7C15
cdef double TWO_PI = 6.283185307179586
cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef double RANK_TOL = 1e-10

cdef double CF_TOL = 1e-14
cdef int CF_MAX_ITER = 300
cdef double CF_TINY = 1e-300


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = z ^ (z >> 30)
    z = z * <uint64_t>0xBF58476D1CE4E5B9
    z = z ^ (z >> 27)
    z = z * <uint64_t>0x94D049BB133111EB
    z = z ^ (z >> 31)
    return z


def normal_stream(seed, Py_ssize_t n):
    """Return ``n`` deterministic N(0,1) draws for the given 64-bit seed."""
    if n <= 0:
        return np.empty(0, dtype=np.float64)
    cdef Py_ssize_t npairs = (n + 1) // 2
    out_arr = np.empty(2 * npairs, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef uint64_t state = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t z
    cdef double u1, u2, r, arg
    cdef Py_ssize_t j
    for j in range(npairs):
        state = state + GAMMA
        z = _mix64(state)
        u1 = <double>((z >> 11) + 1) * INV_2_53
        state = state + GAMMA
        z = _mix64(state)
        u2 = <double>((z >> 11) + 1) * INV_2_53
        r = sqrt(-2.0 * log(u1))
        arg = TWO_PI * u2
        out[2 * j] = r * cos(arg)
        out[2 * j + 1] = r * sin(arg)
    return out_arr[:n]


def ols_solve(X, y):
    """Least squares via Householder QR with column pivoting.

    Returns (beta, diag of (X'X)^-1, rank); on rank deficiency beta and
    diag are zeros and only rank is meaningful.
    """
    X_arr = np.ascontiguousarray(X, dtype=np.float64)
    y_arr = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t T = X_arr.shape[0]
    cdef Py_ssize_t k = X_arr.shape[1]
    A_arr = X_arr.copy()
    b_arr = y_arr.copy()
    beta_arr = np.zeros(k, dtype=np.float64)
    diag_arr = np.zeros(k, dtype=np.float64)
    piv_arr = np.arange(k, dtype=np.int64)
    v_arr = np.empty(T, dtype=np.float64)
    zsol_arr = np.empty(k, dtype=np.float64)
    rinv_arr = np.zeros((k, k), dtype=np.float64)

    cdef double[:, ::1] A = A_arr
    cdef double[::1] b = b_arr
    cdef double[::1] beta = beta_arr
    cdef double[::1] diag = diag_arr
    cdef int64_t[::1] piv = piv_arr
    cdef double[::1] v = v_arr
    cdef double[::1] zsol = zsol_arr
    cdef double[:, ::1] rinv = rinv_arr

    cdef Py_ssize_t i, j, l, m, best
    cdef Py_ssize_t rank = k
    cdef double s, bestn, normx, alpha, vtv, w, firstpivot
    cdef int64_t tmppiv

    firstpivot = 0.0
    for j in range(k):
        # Pivot: bring the remaining column with the largest tail norm to j.
        best = j
        bestn = -1.0
        for l in range(j, k):
            s = 0.0
            for i in range(j, T):
                s += A[i, l] * A[i, l]
            if s > bestn:
                bestn = s
                best = l
        if best != j:
            for i in range(T):
                s = A[i, j]
                A[i, j] = A[i, best]
                A[i, best] = s
            tmppiv = piv[j]
            piv[j] = piv[best]
            piv[best] = tmppiv
        normx = sqrt(bestn) if bestn > 0.0 else 0.0
        if j == 0:
            firstpivot = normx
            if normx == 0.0:
                rank = 0
                break
        elif normx <= RANK_TOL * firstpivot:
            rank = j
            break
        # Householder reflector for A[j:, j]: v = x - alpha e1 with
        # alpha = -sign(x0) * ||x||, so R[j, j] = alpha.
        alpha = -normx if A[j, j] >= 0.0 else normx
        for i in range(j, T):
            v[i] = A[i, j]
        v[j] -= alpha
        vtv = 0.0
        for i in range(j, T):
            vtv += v[i] * v[i]
        A[j, j] = alpha
        for i in range(j + 1, T):
            A[i, j] = 0.0
        if vtv > 0.0:
            for l in range(j + 1, k):
                w = 0.0
                for i in range(j, T):
                    w += v[i] * A[i, l]
                w = 2.0 * w / vtv
                for i in range(j, T):
                    A[i, l] -= w * v[i]
            w = 0.0
            for i in range(j, T):
                w += v[i] * b[i]
            w = 2.0 * w / vtv
            for i in range(j, T):
                b[i] -= w * v[i]

    if rank < k:
        return beta_arr, diag_arr, int(rank)

    # Back-substitution R z = (Q'y)[:k], then undo the column permutation.
    for j in range(k - 1, -1, -1):
        s = b[j]
        for m in range(j + 1, k):
            s -= A[j, m] * zsol[m]
        zsol[j] = s / A[j, j]
    for j in range(k):
        beta[piv[j]] = zsol[j]

    # Upper-triangular inverse of R; diag of (X'X)^-1 is the squared row
    # norms of R^-1, permuted back to original column order.
    for l in range(k):
        for j in range(l, -1, -1):
            s = 1.0 if j == l else 0.0
            for m in range(j + 1, l + 1):
                s -= A[j, m] * rinv[m, l]
            rinv[j, l] = s / A[j, j]
    for j in range(k):
        s = 0.0
        for m in range(j, k):
            s += rinv[j, m] * rinv[j, m]
        diag[piv[j]] = s
    return beta_arr, diag_arr, int(rank)


def reg_inc_beta(double a, double b, double x):
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    cdef double ln_front = (
        lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log1p(-x)
    )
    cdef double front = exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


cdef double _beta_cf(double a, double b, double x) except? -1.0:
    cdef double qab = a + b
    cdef double qap = a + 1.0
    cdef double qam = a - 1.0
    cdef double c = 1.0
    cdef double d = 1.0 - qab * x / qap
    cdef double h, aa, delta
    cdef int m, m2
    if fabs(d) < CF_TINY:
        d = CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < CF_TINY:
            d = CF_TINY
        c = 1.0 + aa / c
        if fabs(c) < CF_TINY:
            c = CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < CF_TINY:
            d = CF_TINY
        c = 1.0 + aa / c
        if fabs(c) < CF_TINY:
            c = CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < CF_TOL:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge within "
        f"{CF_MAX_ITER} iterations (a={a}, b={b}, x={x})"
    )
