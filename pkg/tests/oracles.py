"""Independent reference implementations used by the tests.

Plain Python loops over itertools, written straight from the definitions,
sharing no code with the package.
"""
import math
from itertools import combinations, permutations, product

import numpy as np


def gromov_product(d, x, y, w):
    return 0.5 * (d[x][w] + d[y][w] - d[x][y])


def delta_gromov(d):
    n = len(d)
    best = 0.0
    for x, y, z, w in product(range(n), repeat=4):
        v = min(gromov_product(d, x, z, w), gromov_product(d, y, z, w)) - gromov_product(d, x, y, w)
        best = max(best, v)
    return best


def delta_fourpoint(d):
    best = 0.0
    for i, j, k, l in combinations(range(len(d)), 4):
        s = sorted([d[i][j] + d[k][l], d[i][k] + d[j][l], d[i][l] + d[j][k]])
        best = max(best, (s[2] - s[1]) / 2)
    return best


def ultra_defect(d):
    best = 0.0
    for i, j, k in combinations(range(len(d)), 3):
        s = sorted([d[i][j], d[i][k], d[j][k]])
        best = max(best, s[2] - s[1])
    return best


def triangle_violation(d):
    best = 0.0
    for i, j, k in permutations(range(len(d)), 3):
        best = max(best, d[i][j] - d[i][k] - d[k][j])
    return best


def sign_scan_root(f, lo, hi, step=1e-6):
    """First point of a ``step`` grid on [lo, hi] where a nonincreasing f turns nonpositive.

    ``f`` must accept numpy arrays.
    """
    n = int(math.ceil((hi - lo) / step))
    z = np.minimum(lo + step * np.arange(n + 1), hi)
    hits = np.flatnonzero(f(z) <= 0)
    return float(z[hits[0]]) if hits.size else hi


def upper_hull(points):
    """Knot set of the least concave majorant by checking every point against every chord."""
    keep = []
    for k, (tk, vk) in enumerate(points):
        on_top = True
        for (ti, vi), (tj, vj) in combinations(points, 2):
            if ti < tk < tj:
                chord = vi + (vj - vi) * (tk - ti) / (tj - ti)
                if chord >= vk:
                    on_top = False
                    break
        if on_top:
            keep.append(k)
    return keep
