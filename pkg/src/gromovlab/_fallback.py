"""Pure numpy versions of the brute-force defect kernels.

Same contract as the compiled ``_kernels`` module: scan tuples whose leading
index lies in ``firsts`` (ascending), return ``(best, witness)`` with the
lexicographically first tuple reaching ``best``. Operation order mirrors the
compiled code exactly, so both backends produce identical bits.
"""
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=256)
def _pairs(m):
    # row-major (k, l) pairs with k < l, i.e. lexicographic order
    k, l = np.triu_indices(m, 1)
    return k, l


def _median3(a, b, c):
    return np.maximum(np.minimum(a, b), np.minimum(np.maximum(a, b), c))


def fourpoint_max(d, firsts):
    n = d.shape[0]
    best, wit = -np.inf, None
    for i in firsts:
        i = int(i)
        for j in range(i + 1, n - 2):
            off = j + 1
            k, l = _pairs(n - off)
            k = k + off
            l = l + off
            s1 = d[i, j] + d[k, l]
            s2 = d[i, k] + d[j, l]
            s3 = d[i, l] + d[j, k]
            hi = np.maximum(np.maximum(s1, s2), s3)
            v = (hi - _median3(s1, s2, s3)) * 0.5
            p = int(np.argmax(v))
            if v[p] > best:
                best = float(v[p])
                wit = (i, j, int(k[p]), int(l[p]))
    return best, wit


def gromov_max(d, firsts):
    n = d.shape[0]
    best, wit = -np.inf, None
    if len(firsts) == 0:
        return best, wit
    # pyz[y, z, w]; does not depend on x
    pyz = 0.5 * ((d[:, None, :] + d[None, :, :]) - d[:, :, None])
    for x in firsts:
        x = int(x)
        # pxz[z, w]; pxy[y, w] is the same expression with z renamed y
        pxz = 0.5 * ((d[x][None, :] + d) - d[x][:, None])
        pxy = pxz
        v = np.minimum(pxz[None, :, :], pyz) - pxy[:, None, :]
        p = int(np.argmax(v))
        if v.flat[p] > best:
            best = float(v.flat[p])
            y, z, w = np.unravel_index(p, v.shape)
            wit = (x, int(y), int(z), int(w))
    return best, wit


def ultra_max(d, firsts):
    n = d.shape[0]
    best, wit = -np.inf, None
    for i in firsts:
        i = int(i)
        for j in range(i + 1, n - 1):
            k = np.arange(j + 1, n)
            p = d[i, j]
            q = d[i, k]
            r = d[j, k]
            v = np.maximum(np.maximum(p, q), r) - _median3(p, q, r)
            a = int(np.argmax(v))
            if v[a] > best:
                best = float(v[a])
                wit = (i, j, int(k[a]))
    return best, wit


def triangle_max(d, firsts):
    n = d.shape[0]
    best, wit = -np.inf, None
    if n < 3:
        return best, wit
    for i in firsts:
        i = int(i)
        for j in range(i + 1, n):
            v = (d[i, j] - d[i, :]) - d[:, j]
            v[i] = -np.inf
            v[j] = -np.inf
            a = int(np.argmax(v))
            if v[a] > best:
                best = float(v[a])
                wit = (i, j, a)
    return best, wit
