"""Pure-numpy pair-projection kernel: reference path and fallback backend.

Same contract as the numba kernel in _kernels_numba: for each (i, j) pair,
solve the stacked row-orthonormal system [C_i; C_j] x = [e_i; e_j] in the
minimum-norm least-squares sense, project x onto both flats, and write
midpoint, distance, closest points, and a rank-deficiency flag into the
preallocated output slots. Each pair writes only its own slots, so results
are independent of iteration order.
"""

from __future__ import annotations

import numpy as np


def pair_kernel(V, e, base, kk, pi, pj, rank_tol, mid, dist, ca, cb, deg):
    d = V.shape[1]
    for t in range(pi.shape[0]):
        i = pi[t]
        j = pj[t]
        ki = kk[i]
        kj = kk[j]
        mi = d - ki
        mj = d - kj
        A = np.concatenate((V[i, ki:], V[j, kj:]), axis=0)
        b = np.concatenate((e[i, :mi], e[j, :mj]))
        u, s, vt = np.linalg.svd(A, full_matrices=False)
        keep = s > rank_tol * s[0]
        x = vt[keep].T @ ((u[:, keep].T @ b) / s[keep])
        wi = V[i, :ki] @ (x - base[i])
        qi = base[i] + V[i, :ki].T @ wi
        wj = V[j, :kj] @ (x - base[j])
        qj = base[j] + V[j, :kj].T @ wj
        mid[t] = x
        dist[t] = np.sqrt(np.sum((qi - qj) ** 2))
        ca[t] = qi
        cb[t] = qj
        deg[t] = int(keep.sum()) < d
