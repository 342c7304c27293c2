"""Numba pair-projection kernel. Contract documented in _kernels_numpy."""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def pair_kernel(V, e, base, kk, pi, pj, rank_tol, mid, dist, ca, cb, deg):
    d = V.shape[1]
    for t in prange(pi.shape[0]):
        i = pi[t]
        j = pj[t]
        ki = kk[i]
        kj = kk[j]
        mi = d - ki
        mj = d - kj
        A = np.empty((mi + mj, d))
        b = np.empty(mi + mj)
        A[:mi] = V[i, ki:]
        A[mi:] = V[j, kj:]
        b[:mi] = e[i, :mi]
        b[mi:] = e[j, :mj]
        u, s, vt = np.linalg.svd(A, False)
        smax = s[0]
        x = np.zeros(d)
        rank = 0
        for r in range(s.shape[0]):
            if s[r] > rank_tol * smax:
                coef = 0.0
                for q in range(b.shape[0]):
                    coef += u[q, r] * b[q]
                coef /= s[r]
                for q in range(d):
                    x[q] += vt[r, q] * coef
                rank += 1
        wi = V[i, :ki] @ (x - base[i])
        qi = base[i] + V[i, :ki].T @ wi
        wj = V[j, :kj] @ (x - base[j])
        qj = base[j] + V[j, :kj].T @ wj
        acc = 0.0
        for q in range(d):
            acc += (qi[q] - qj[q]) ** 2
        mid[t] = x
        dist[t] = np.sqrt(acc)
        ca[t] = qi
        cb[t] = qj
        deg[t] = rank < d
