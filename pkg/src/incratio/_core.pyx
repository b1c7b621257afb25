# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled misreport-evaluation kernel.

Mirrors `incratio._core_py.cd_batch_eval`; see that module for the
contract. The per-candidate equilibrium solve (first adjugate row of the
spending matrix via pivoted Gaussian-elimination minors) runs entirely in
C, which is what makes the bound-verification sweeps cheap.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()

BACKEND = "compiled"

cdef enum:
    MAXM = 16

cdef double _SIGN_RTOL = 1e-9


cdef double _det(double* a, int n) noexcept nogil:
    """Determinant of a row-major n x n buffer, destroying it."""
    cdef int i, j, k, piv
    cdef double best, factor, det = 1.0, tmp
    for k in range(n):
        piv = k
        best = fabs(a[k * n + k])
        for i in range(k + 1, n):
            if fabs(a[i * n + k]) > best:
                best = fabs(a[i * n + k])
                piv = i
        if best == 0.0:
            return 0.0
        if piv != k:
            det = -det
            for j in range(n):
                tmp = a[k * n + j]
                a[k * n + j] = a[piv * n + j]
                a[piv * n + j] = tmp
        det *= a[k * n + k]
        for i in range(k + 1, n):
            factor = a[i * n + k] / a[k * n + k]
            for j in range(k + 1, n):
                a[i * n + j] -= factor * a[k * n + j]
    return det


def cd_batch_eval(endow, alphas, agent, cands, alpha_true):
    """True utility agent `agent` obtains at each candidate report."""
    cdef const double[:, ::1] e = np.ascontiguousarray(endow, dtype=np.float64)
    cdef const double[:, ::1] a = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef const double[:, ::1] c = np.ascontiguousarray(cands, dtype=np.float64)
    cdef const double[::1] at = np.ascontiguousarray(alpha_true, dtype=np.float64)
    cdef Py_ssize_t ag = agent
    cdef int n = e.shape[0]
    cdef int m = e.shape[1]
    cdef Py_ssize_t K = c.shape[0]
    if m > MAXM:
        raise ValueError(f"compiled kernel supports at most {MAXM} commodities")

    out_arr = np.empty(K, dtype=np.float64)
    cdef double[::1] out = out_arr

    cdef double base[MAXM * MAXM]
    cdef double M[MAXM * MAXM]
    cdef double minor[MAXM * MAXM]
    cdef double p[MAXM]
    cdef double nan = float("nan")

    cdef Py_ssize_t k
    cdef int i, j, col, r, rr, lead
    cdef double s, budget, scale, u, xj

    # spending contributions of the non-deviating agents
    for j in range(m):
        for col in range(m):
            s = 0.0
            for i in range(n):
                if i != ag:
                    s += e[i, j] * a[i, col]
            base[j * m + col] = s

    with nogil:
        for k in range(K):
            for j in range(m):
                for col in range(m):
                    M[j * m + col] = base[j * m + col] + e[ag, j] * c[k, col]
                M[j * m + j] -= 1.0

            if m == 1:
                p[0] = 1.0
            else:
                for j in range(m):
                    # minor: drop row j and column 0
                    rr = 0
                    for r in range(m):
                        if r == j:
                            continue
                        for col in range(1, m):
                            minor[rr * (m - 1) + (col - 1)] = M[r * m + col]
                        rr += 1
                    p[j] = _det(minor, m - 1)
                    if j % 2 == 1:
                        p[j] = -p[j]

            scale = 0.0
            lead = 0
            for j in range(m):
                if fabs(p[j]) > scale:
                    scale = fabs(p[j])
                    lead = j
            if scale == 0.0:
                out[k] = nan
                continue
            if p[lead] < 0.0:
                for j in range(m):
                    p[j] = -p[j]
            u = 0.0
            for j in range(m):
                if p[j] < -_SIGN_RTOL * scale:
                    u = nan
                if p[j] < 0.0:
                    p[j] = 0.0
            if u != u:
                out[k] = nan
                continue

            budget = 0.0
            for j in range(m):
                budget += p[j] * e[ag, j]

            u = 1.0
            for j in range(m):
                if c[k, j] == 0.0:
                    xj = 0.0
                elif p[j] > 0.0:
                    xj = c[k, j] * budget / p[j]
                else:
                    u = nan
                    break
                u *= pow(xj, at[j])
            out[k] = u

    return out_arr
