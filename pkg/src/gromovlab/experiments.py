"""Desk-scale experiments on sampled half lines and rough geodesics.

All randomized routines take an explicit seed. Quadruple enumeration is
Θ(n⁴), keep samples at n ≤ 64 for sweeps.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CannotPerturb
from .metric_core import (
    FiniteMetricSpace,
    Method,
    hyperbolicity_delta,
    triangle_defect,
    triangle_tolerance,
    ultrametric_defect,
)
from .transforms import GridSpec, apply_transform


@dataclass(frozen=True, eq=False)
class HalfLineSample:
    params: GridSpec
    points: np.ndarray

    def __post_init__(self):
        if self.points[0] != 0 or np.any(np.diff(self.points) <= 0):
            raise ValueError("half-line sample must start at 0 and be strictly increasing")

    @property
    def n(self):
        return self.points.size

    def space(self):
        return FiniteMetricSpace.from_points(self.points)


@dataclass(frozen=True, eq=False)
class RoughGeodesicSample:
    params: np.ndarray
    images: np.ndarray
    space: FiniteMetricSpace

    @property
    def k_hat(self):
        return rough_isometry_defect(self.params, self.space, self.images)


def sample_halfline(grid):
    return HalfLineSample(grid, grid.points())


def transformed_halfline_space(sample, phi):
    """The sample with distances φ(|t_i − t_j|)."""
    return apply_transform(sample.space(), phi)


@dataclass(frozen=True)
class SweepRow:
    T: float
    delta: float
    ultra_defect: float
    n: int
    delta_witness: tuple
    ultra_witness: tuple


def delta_sweep(phi, schedule, workers=1):
    """Brute-force four-point δ and ultrametric defect of each transformed sample.

    Entries run concurrently when ``workers`` > 1; rows come back in schedule order.
    """

    def one(grid):
        X = transformed_halfline_space(sample_halfline(grid), phi)
        h = hyperbolicity_delta(X, Method.FOUR_POINT)
        u = ultrametric_defect(X)
        return SweepRow(grid.t_max, h.delta, u.defect, X.n, h.witness, u.witness)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, schedule))
    return [one(g) for g in schedule]


def geometric_schedule(Ts, count=48, t_min=1.0):
    return [GridSpec.geometric(t_min, T, count) for T in Ts]


def rough_midpoint_defect(X, pair):
    """min over z of max{d(x,z), d(z,y)} − ½d(x,y), and the best z."""
    x, y = pair
    X._check_index(x, y)
    d = X.dist
    worst = np.maximum(d[x], d[y]) - 0.5 * d[x, y]
    z = int(np.argmin(worst))
    return float(worst[z]), z


def rough_isometry_defect(params, X, images):
    """k̂ = max over pairs of |d(γ_i, γ_j) − |t_i − t_j||."""
    t = np.asarray(params, dtype=float)
    img = np.asarray(images, dtype=np.intp)
    if t.shape != img.shape:
        raise ValueError(f"{t.size} parameters but {img.size} images")
    X._check_index(*img.tolist())
    d = X.dist[np.ix_(img, img)]
    return float(np.max(np.abs(d - np.abs(t[:, None] - t[None, :])))) if t.size else 0.0


def perturbed_similarity(X, lam, k, seed=0, retries=100):
    """λ·d plus symmetrized uniform noise in [−k, k] off the diagonal, validated."""
    if not lam > 0 or k < 0:
        raise ValueError(f"need lam > 0 and k >= 0, got {lam}, {k}")
    rng = np.random.default_rng(seed)
    base = lam * X.dist
    if k == 0:
        return FiniteMetricSpace(base, X.labels)
    off = ~np.eye(X.n, dtype=bool)
    last = None
    for _ in range(retries):
        noise = rng.uniform(-k, k, size=base.shape)
        noise = 0.5 * (noise + noise.T)
        d = np.where(off, base + noise, 0.0)
        if np.all(d[off] > 0):
            defect, wit = triangle_defect(d)
            if defect <= triangle_tolerance(d):
                return FiniteMetricSpace(d, X.labels)
            last = wit
    raise CannotPerturb(
        f"no valid ({lam}, {k}) perturbation in {retries} tries; k is too large for this space",
        witness=last,
    )


def embed_halfline_check(phi, k, eta_hat, sample, seed=0, extra_points=8):
    """Transform a k-rough copy of the half-line sample and compare to φ(k) + η̂.

    The copy sits on the x-axis of the plane, each point jittered along the
    axis by at most k/2, together with ``extra_points`` points off the axis.
    After transforming the whole planar space by φ, the embedding of
    ([0, ∞), φ(|·|)) must have rough-isometry defect at most φ(k) + η̂.
    """
    rng = np.random.default_rng(seed)
    t = sample.points
    jitter = rng.uniform(-0.5 * k, 0.5 * k, t.size) if k > 0 else np.zeros(t.size)
    on_axis = np.column_stack([t + jitter, np.zeros(t.size)])
    span = max(float(t[-1]), 1.0)
    off_axis = np.column_stack(
        [rng.uniform(0, span, extra_points), rng.uniform(0.1 * span, span, extra_points)]
    )
    pts = np.vstack([on_axis, off_axis])
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    X = FiniteMetricSpace(d)
    images = np.arange(t.size)
    k_hat = rough_isometry_defect(t, X, images)
    Xphi = apply_transform(X, phi)
    phi_params = np.asarray(phi(np.abs(t[:, None] - t[None, :])))
    dphi = Xphi.dist[np.ix_(images, images)]
    defect = float(np.max(np.abs(dphi - phi_params)))
    bound = float(phi(k)) + eta_hat
    return {
        "k": float(k),
        "k_hat": k_hat,
        "eta_hat": float(eta_hat),
        "defect": defect,
        "bound": bound,
        "ok": defect <= bound + 1e-12 * max(1.0, bound),
    }


def random_metric_space(n, seed, kind="euclidean", offset=0.0):
    """Seeded random test spaces: 'euclidean' (points in the unit square),
    'tree' (random weighted tree, path metric) or 'graph' (shortest paths
    in a random weighted graph). ``offset`` is added off the diagonal.
    """
    rng = np.random.default_rng(seed)
    if kind == "euclidean":
        pts = rng.uniform(0, 1, (n, 2))
        diff = pts[:, None, :] - pts[None, :, :]
        d = np.hypot(diff[..., 0], diff[..., 1])
    elif kind in ("tree", "graph"):
        w = np.full((n, n), np.inf)
        np.fill_diagonal(w, 0.0)
        for v in range(1, n):
            u = int(rng.integers(0, v))
            w[u, v] = w[v, u] = rng.uniform(0.5, 2.0)
        if kind == "graph" and n > 1:
            for _ in range(n):
                u, v = rng.choice(n, 2, replace=False)
                w[u, v] = w[v, u] = min(w[u, v], rng.uniform(0.5, 2.0))
        d = w
        for m in range(n):
            d = np.minimum(d, d[:, m][:, None] + d[m][None, :])
        d = np.minimum(d, d.T)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if offset:
        d = d + offset * (1 - np.eye(n))
    return FiniteMetricSpace(d)
