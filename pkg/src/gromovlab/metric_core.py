"""Finite metric spaces and exact brute-force defect computations.

Everything here enumerates every tuple (Θ(n³) or Θ(n⁴)); the intended scale is
n ≤ ~100 points. Heavy loops live in the compiled kernels selected by
:mod:`gromovlab._backend`.
"""
from dataclasses import dataclass, field
from enum import Enum
from itertools import permutations

import numpy as np

from . import _backend
from .errors import MetricSpaceError

#: relative triangle-inequality tolerance, scaled by the largest distance
TRIANGLE_RTOL = 1e-9


class Method(str, Enum):
    GROMOV_PRODUCT = "GromovProduct"
    FOUR_POINT = "FourPoint"


def triangle_tolerance(dist):
    dist = np.asarray(dist, dtype=float)
    return TRIANGLE_RTOL * (float(dist.max()) if dist.size else 0.0)


def _check_table(dist):
    d = np.array(dist, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise MetricSpaceError(f"distance table must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise MetricSpaceError("distance table has non-finite entries")
    diag = np.flatnonzero(np.diag(d) != 0)
    if diag.size:
        i = int(diag[0])
        raise MetricSpaceError(f"nonzero diagonal entry d({i},{i})", witness=(i, i))
    asym = np.argwhere(d != d.T)
    if asym.size:
        i, j = (int(v) for v in asym[0])
        raise MetricSpaceError(f"asymmetric table: d({i},{j}) != d({j},{i})", witness=(i, j))
    return d


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """n points with a symmetric table of pairwise distances.

    Construction validates zero diagonal, exact symmetry, positivity off the
    diagonal and the triangle inequality within :func:`triangle_tolerance`.
    The stored table is read-only.
    """

    dist: np.ndarray
    labels: tuple = field(default=None)

    def __post_init__(self):
        d = _check_table(self.dist)
        n = d.shape[0]
        if n < 1:
            raise MetricSpaceError("a metric space needs at least one point")
        off = ~np.eye(n, dtype=bool)
        if np.any(d[off] <= 0):
            i, j = (int(v) for v in np.argwhere((d <= 0) & off)[0])
            raise MetricSpaceError(f"d({i},{j}) = {d[i, j]!r} must be positive", witness=(i, j))
        defect, wit = triangle_defect(d)
        if defect > triangle_tolerance(d):
            raise MetricSpaceError(
                f"triangle inequality violated by {defect!r} at {wit}", witness=wit
            )
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != n:
                raise MetricSpaceError(f"{len(labels)} labels for {n} points")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.dist.shape[0]

    def __len__(self):
        return self.n

    def __getitem__(self, ij):
        i, j = ij
        return float(self.dist[i, j])

    def subspace(self, indices):
        idx = np.asarray(indices, dtype=np.intp)
        labels = None if self.labels is None else [self.labels[i] for i in idx]
        return FiniteMetricSpace(self.dist[np.ix_(idx, idx)], labels)

    @classmethod
    def from_points(cls, points, labels=None):
        """Euclidean distances between the rows of ``points`` (or a 1-d array)."""
        p = np.asarray(points, dtype=float)
        if p.ndim == 1:
            p = p[:, None]
        diff = p[:, None, :] - p[None, :, :]
        if p.shape[1] == 1:
            d = np.abs(diff[..., 0])
        else:
            d = np.sqrt(np.sum(diff * diff, axis=-1))
        return cls(d, labels)

    def _check_index(self, *idx):
        for i in idx:
            if not (0 <= int(i) < self.n) or int(i) != i:
                raise IndexError(f"point index {i!r} out of range for {self.n} points")


@dataclass(frozen=True)
class HyperbolicityReport:
    delta: float
    witness: tuple
    method: Method

    def to_dict(self):
        return {"delta": self.delta, "witness": list(self.witness), "method": self.method.value}


@dataclass(frozen=True)
class UltrametricReport:
    defect: float
    witness: tuple

    def to_dict(self):
        return {"defect": self.defect, "witness": list(self.witness)}


def gromov_product(X, x, y, w):
    """(x|y)_w = ½[d(x,w) + d(y,w) − d(x,y)]."""
    X._check_index(x, y, w)
    d = X.dist
    return 0.5 * ((float(d[x, w]) + float(d[y, w])) - float(d[x, y]))


def fourpoint_value(X, quad):
    """(L − M)/2 for the three pairing sums of ``quad``."""
    i, j, k, l = quad
    d = X.dist
    s1 = float(d[i, j]) + float(d[k, l])
    s2 = float(d[i, k]) + float(d[j, l])
    s3 = float(d[i, l]) + float(d[j, k])
    hi = max(max(s1, s2), s3)
    mid = max(min(s1, s2), min(max(s1, s2), s3))
    return (hi - mid) * 0.5


def gromov_value(X, quad):
    """max(0, min{(x|z)_w, (y|z)_w} − (x|y)_w) for the ordered quadruple."""
    x, y, z, w = quad
    d = X.dist
    pxz = 0.5 * ((float(d[x, w]) + float(d[z, w])) - float(d[x, z]))
    pyz = 0.5 * ((float(d[y, w]) + float(d[z, w])) - float(d[y, z]))
    pxy = 0.5 * ((float(d[x, w]) + float(d[y, w])) - float(d[x, y]))
    return max(0.0, min(pxz, pyz) - pxy)


def ultrametric_value(X, triple):
    """Largest minus medium of the three pairwise distances."""
    i, j, k = triple
    d = X.dist
    p, q, r = float(d[i, j]), float(d[i, k]), float(d[j, k])
    return max(max(p, q), r) - max(min(p, q), min(max(p, q), r))


def hyperbolicity_delta(X, method=Method.FOUR_POINT, workers=1, backend=None):
    """Exact Gromov δ by enumeration.

    ``Method.GROMOV_PRODUCT`` scans all n⁴ ordered quadruples of the product
    definition; ``Method.FOUR_POINT`` scans unordered quadruples and takes
    half the gap between the two largest pairing sums. The two constants
    coincide. The witness is the lexicographically smallest quadruple
    attaining δ; spaces with fewer than four points report δ = 0 with the
    degenerate witness (0, 0, 0, 0).
    """
    method = Method(method)
    kernel = "gromov_max" if method is Method.GROMOV_PRODUCT else "fourpoint_max"
    best, wit = _backend.reduce_max(X.dist, kernel, workers=workers, backend=backend)
    if wit is None:
        return HyperbolicityReport(0.0, (0, 0, 0, 0), method)
    return HyperbolicityReport(max(0.0, best), wit, method)


def ultrametric_defect(X, workers=1, backend=None):
    """Smallest δ with d(x,y) ≤ max{d(x,z), d(y,z)} + δ on every triple."""
    best, wit = _backend.reduce_max(X.dist, "ultra_max", workers=workers, backend=backend)
    if wit is None:
        return UltrametricReport(0.0, (0, 0, 0))
    return UltrametricReport(max(0.0, best), wit)


def triangle_defect(table, workers=1, backend=None):
    """max over (i, j, k) of max(0, d(i,j) − d(i,k) − d(k,j)) and a witness.

    Works on raw tables (not yet wrapped as a metric space); the table must be
    symmetric with a zero diagonal. Returns ``(0.0, None)`` below 3 points.
    """
    d = _check_table(table)
    best, wit = _backend.reduce_max(d, "triangle_max", workers=workers, backend=backend)
    if wit is None:
        return 0.0, None
    if best <= 0:
        # every triple attains the clamped value 0; report the first one
        return 0.0, (0, 1, 2)
    return best, wit


def is_triangle_triplet(a, b, c):
    if min(a, b, c) < 0:
        raise ValueError(f"triangle triplet entries must be nonnegative, got {(a, b, c)}")
    return a <= b + c and b <= a + c and c <= a + b


def sums_lemma_defects(A):
    """Defects on both sides of the 4×4 sums lemma.

    Returns ``(triple_defect, pair_defect)``: the largest a_ij − max{a_ik, a_kj}
    over distinct i, j, k, and the largest L − M over the three pairings
    a_ij + a_kl. The lemma states pair_defect ≤ 2·max(0, triple_defect).
    """
    a = np.asarray(A, dtype=float)
    if a.shape != (4, 4):
        raise ValueError(f"expected a 4x4 table, got shape {a.shape}")
    if np.any(a != a.T):
        raise ValueError("table must be symmetric")
    triple = max(
        a[i, j] - max(a[i, k], a[k, j]) for i, j, k in permutations(range(4), 3)
    )
    sums = sorted(
        (a[0, 1] + a[2, 3], a[0, 2] + a[1, 3], a[0, 3] + a[1, 2]), reverse=True
    )
    return float(triple), float(sums[0] - sums[1])
