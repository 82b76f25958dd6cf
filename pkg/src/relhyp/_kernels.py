"""Compiled inner loops for the four-point scans."""

import warnings

import numpy as np
from numba import njit, prange

# numba warns about an old TBB build on first parallel launch, then falls back to OpenMP
warnings.filterwarnings("ignore", message="The TBB threading layer")


@njit(cache=True, inline="always")
def _defect(s1, s2, s3):
    # largest minus second largest of three sums
    if s1 < s2:
        s1, s2 = s2, s1
    if s2 < s3:
        s2, s3 = s3, s2
        if s1 < s2:
            s1, s2 = s2, s1
    return s1 - s2


@njit(parallel=True, cache=True)
def four_point_exact(D):
    """Max four-point defect over i<j<k<l and the lexicographically first witness."""
    n = D.shape[0]
    best = np.full(n, -1, np.int64)
    wit = np.zeros((n, 3), np.int64)
    for i in prange(n):
        b = -1
        bj = 0
        bk = 0
        bl = 0
        for j in range(i + 1, n):
            dij = D[i, j]
            for k in range(j + 1, n):
                dik = D[i, k]
                djk = D[j, k]
                for l in range(k + 1, n):
                    d = _defect(dij + D[k, l], dik + D[j, l], D[i, l] + djk)
                    if d > b:
                        b = d
                        bj = j
                        bk = k
                        bl = l
        best[i] = b
        wit[i, 0] = bj
        wit[i, 1] = bk
        wit[i, 2] = bl
    top = -1
    arg = np.zeros(4, np.int64)
    for i in range(n):
        if best[i] > top:
            top = best[i]
            arg[0] = i
            arg[1] = wit[i, 0]
            arg[2] = wit[i, 1]
            arg[3] = wit[i, 2]
    return max(top, 0), arg


@njit(parallel=True, cache=True)
def four_point_based(D, p):
    """Max defect over quadruples that contain the base vertex p."""
    n = D.shape[0]
    best = np.full(n, -1, np.int64)
    wit = np.zeros((n, 2), np.int64)
    for i in prange(n):
        b = -1
        bj = 0
        bk = 0
        dpi = D[p, i]
        for j in range(i + 1, n):
            dij = D[i, j]
            dpj = D[p, j]
            for k in range(j + 1, n):
                d = _defect(dpi + D[j, k], dpj + D[i, k], D[p, k] + dij)
                if d > b:
                    b = d
                    bj = j
                    bk = k
        best[i] = b
        wit[i, 0] = bj
        wit[i, 1] = bk
    top = -1
    arg = np.zeros(4, np.int64)
    arg[0] = p
    for i in range(n):
        if best[i] > top:
            top = best[i]
            arg[1] = i
            arg[2] = wit[i, 0]
            arg[3] = wit[i, 1]
    return max(top, 0), arg
