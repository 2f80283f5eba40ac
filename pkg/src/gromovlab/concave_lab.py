"""Concave-function machinery: one-sided derivatives, the asymptotic slope λ,
the root-finders ω(x, y) and ω̂(x), midpoint-concavity defects, least concave
majorants and the linear cap near 0.

The root-finders assume φ is unbounded, concave, strictly increasing and
vanishes at 0; when the sign conditions of the bracket fail they raise
:class:`~gromovlab.errors.BracketFailure` rather than guessing.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketFailure, InvalidRange, TransformSpecError
from .transforms import Dilation, TransformSpec, Tabulated, _grid_points, write_knots

#: default relative bracket width for bisection
BISECT_RTOL = 1e-10


@dataclass(frozen=True)
class DerivativeEstimate:
    value: float
    side: str
    t: float
    h_used: float
    history: tuple = field(default=(), repr=False)


@dataclass(frozen=True)
class LambdaEstimate:
    lambda_hat: float
    T_used: float
    secant_sequence: tuple


def one_sided_derivative(phi, t, side="right", h0=1.0, rtol=1e-8, h_min=1e-12):
    """Secant estimate of φ'₊(t) or φ'₋(t), halving h until it settles.

    Stops once successive estimates differ by less than ``rtol`` (absolute)
    or h drops below ``h_min``. The derivative at 0 may be infinite, so
    t ≤ 0 is refused.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if not t > 0:
        raise ValueError(f"one-sided derivatives are only estimated for t > 0, got {t}")
    if not h0 > 0:
        raise ValueError(f"h0 must be positive, got {h0}")
    # a left secant must stay inside (0, t)
    h = min(h0, t / 2) if side == "left" else h0
    ft = phi(t)

    def secant(h):
        if side == "right":
            return (phi(t + h) - ft) / h
        return (ft - phi(t - h)) / h

    prev = secant(h)
    history = [(h, prev)]
    while h / 2 >= h_min:
        h /= 2
        cur = secant(h)
        history.append((h, cur))
        if abs(cur - prev) < rtol:
            return DerivativeEstimate(cur, side, t, h, tuple(history))
        prev = cur
    return DerivativeEstimate(prev, side, t, h, tuple(history))


def lambda_estimate(phi, T_max, levels=24):
    """λ̂ = (φ(2T) − φ(T))/T at T = T_max, with the secants at T_max/2^k.

    For concave φ the secant slopes are nonincreasing in T and bound the
    asymptotic slope from above. ``secant_sequence`` lists (T, slope) in
    increasing T.
    """
    if not T_max > 0:
        raise ValueError(f"T_max must be positive, got {T_max}")
    Ts = T_max / 2.0 ** np.arange(levels - 1, -1, -1)
    slopes = (phi(2 * Ts) - phi(Ts)) / Ts
    seq = tuple((float(T), float(s)) for T, s in zip(Ts, slopes))
    return LambdaEstimate(max(0.0, seq[-1][1]), float(T_max), seq)


def bisect_decreasing(f, lo, hi, tol=BISECT_RTOL, max_iter=200, ftol=0.0):
    """Root of a nonincreasing f on [lo, hi] with f(lo) ≥ 0 ≥ f(hi).

    Terminates when the bracket is narrower than ``tol``·max(1, |hi|) or
    stops shrinking in floating point; returns the bracket midpoint.
    Endpoint values within ``ftol`` of the wrong sign count as roots there
    (rounding noise where f vanishes at an endpoint).
    """
    flo, fhi = f(lo), f(hi)
    if flo < -ftol or fhi > ftol:
        raise BracketFailure(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={flo!r}, f(hi)={fhi!r}", witness=(lo, hi)
        )
    if flo <= 0:
        return lo
    if fhi >= 0:
        return hi
    width = tol * max(1.0, abs(hi))
    for _ in range(max_iter):
        if hi - lo <= width:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if fm > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _roundoff(scale):
    # a few ulps of the largest term in the residual
    return 16 * np.finfo(float).eps * max(1.0, abs(scale))


def omega_bracket(x, y):
    return x, min(0.5 * (x + y), 2.0 * x)


def omega_residual(phi, x, y, z):
    """f(z) = φ(x) − φ(y) + φ(y − z) − φ(z − x); strictly decreasing on [x, y]."""
    return phi(x) - phi(y) + phi(y - z) - phi(max(z - x, 0.0))


def omega(phi, x, y, tol=BISECT_RTOL):
    """The unique z in [x, min{(x+y)/2, 2x}] with (x|z)₀ = (y|z)₀ in the transformed half line."""
    if not 0 <= x < y:
        raise InvalidRange(f"omega needs 0 <= x < y, got x={x}, y={y}", witness=(x, y))
    lo, hi = omega_bracket(x, y)
    if hi <= lo:
        return lo
    return bisect_decreasing(
        lambda z: omega_residual(phi, x, y, z), lo, hi, tol, ftol=_roundoff(phi(y))
    )


def omega_hat_residual(phi, x, lam, w):
    """g(w) = φ(x) − φ(w − x) − λ·w."""
    return phi(x) - phi(max(w - x, 0.0)) - lam * w


def omega_hat(phi, x, lam, tol=BISECT_RTOL):
    """ŵ in [x, 2x] with φ(x) − φ(ŵ − x) = λ·ŵ; exactly 2x when λ = 0."""
    if x < 0 or lam < 0:
        raise InvalidRange(f"omega_hat needs x >= 0 and lambda >= 0, got {x}, {lam}", witness=(x, lam))
    if lam == 0:
        return 2.0 * x
    if x == 0:
        return 0.0
    return bisect_decreasing(
        lambda w: omega_hat_residual(phi, x, lam, w), x, 2.0 * x, tol, ftol=_roundoff(phi(2.0 * x))
    )


def omega_sequence(phi, x, ys, tol=BISECT_RTOL):
    """ω(x, y) along increasing y; the limit is ω̂(x). Reported, not asserted monotone."""
    return [(float(y), omega(phi, x, y, tol)) for y in ys]


def hyp_condition_defect(phi, x, lam, tol=BISECT_RTOL):
    """φ(ŵ) − φ(ŵ − x) − λx. A δ-hyperbolic transformed half line has 2δ at least this."""
    w = omega_hat(phi, x, lam, tol)
    return phi(w) - phi(max(w - x, 0.0)) - lam * x


def midconcavity_defect(phi, grid):
    """max over grid pairs of ½φ(x) + ½φ(y) − φ((x+y)/2), midpoints evaluated exactly."""
    t = _grid_points(grid)
    v = phi(t)
    gap = 0.5 * v[:, None] + 0.5 * v[None, :] - phi(0.5 * (t[:, None] + t[None, :]))
    gap[np.tril_indices(t.size, -1)] = -np.inf
    p = int(np.argmax(gap))
    i, j = np.unravel_index(p, gap.shape)
    value = float(gap[i, j])
    if value <= 0:
        return 0.0, (float(t[0]), float(t[0]))
    return value, (float(t[i]), float(t[j]))


def concavity_check(phi, grid, rtol=1e-12):
    """Heuristic: are consecutive secant slopes on the grid nonincreasing?

    Returns (ok, worst increase). Only a sampled certificate.
    """
    t = _grid_points(grid)
    s = np.diff(phi(t)) / np.diff(t)
    inc = np.diff(s)
    worst = float(inc.max()) if inc.size else 0.0
    return worst <= rtol * max(1.0, float(np.abs(s).max())), max(0.0, worst)


@dataclass(frozen=True, eq=False)
class ConcaveEnvelope:
    """Piecewise-linear concave function through the upper-hull knots."""

    knots: np.ndarray
    values: np.ndarray

    def __call__(self, t):
        out = np.interp(np.asarray(t, dtype=float), self.knots, self.values)
        return float(out) if np.ndim(out) == 0 else out

    def to_csv(self, path):
        write_knots(path, self.knots, self.values)

    def as_transform(self, slope=0.0):
        return Tabulated(self.knots, self.values, slope)


def least_concave_majorant(points):
    """Upper concave envelope of (t, v) points with strictly increasing t.

    Monotone-chain upper hull; collinear middle points are dropped.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two (t, v) points")
    t, v = pts[:, 0], pts[:, 1]
    dt = np.diff(t)
    if np.any(dt == 0):
        raise ValueError("duplicate t-values")
    if np.any(dt < 0):
        raise ValueError("t-values must be strictly increasing")
    hull = []
    for k in range(t.size):
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            # drop j when it lies on or below the chord from i to k
            if (v[j] - v[i]) * (t[k] - t[i]) <= (v[k] - v[i]) * (t[j] - t[i]):
                hull.pop()
            else:
                break
        hull.append(k)
    idx = np.asarray(hull)
    return ConcaveEnvelope(t[idx].copy(), v[idx].copy())


def envelope_gap(phi, grid):
    """sup over the grid of (least concave majorant of φ's samples) − φ."""
    t = _grid_points(grid)
    v = phi(t)
    env = least_concave_majorant(np.column_stack([t, v]))
    gap = env(t) - v
    p = int(np.argmax(gap))
    return float(gap[p]), float(t[p]), env


@dataclass(frozen=True)
class CappedTransform(TransformSpec):
    """φ with its graph over [0, a) replaced by a supporting line, shifted to vanish at 0.

    ``raw(t)`` is the unshifted cap: the line slope·(t − a) + level on [0, a)
    and φ on [a, ∞), where level = φ(a). Calling the object subtracts
    ``shift`` = raw(0) so the result is 0 at 0.
    """

    inner: TransformSpec
    a: float
    slope: float
    level: float
    concave = True

    @property
    def shift(self):
        return self.level - self.slope * self.a

    @property
    def metric_transform(self):
        return self.inner.metric_transform

    def raw(self, t):
        t = np.asarray(t, dtype=float)
        line = self.slope * (t - self.a) + self.level
        inner = np.asarray(self.inner._eval(np.maximum(t, self.a)), dtype=float)
        out = np.where(t < self.a, line, inner)
        return float(out) if out.ndim == 0 else out

    def _eval(self, t):
        return np.asarray(self.raw(t)) - self.shift

    @property
    def text(self):
        raise TransformSpecError("cap constructions have no text form; export them with to_csv")

    def to_csv(self, path, grid):
        t = _grid_points(grid)
        if not np.any(t == self.a):
            t = np.sort(np.append(t, self.a))
        write_knots(path, t, self(t))


def inverse_value(phi, level, tol=1e-14):
    """Smallest-bracket bisection for φ(a) = level on an increasing φ."""
    hi = 1.0
    # 1020 doublings stay below the largest float
    for _ in range(1020):
        if phi(hi) >= level:
            break
        hi *= 2.0
    else:
        raise BracketFailure(f"{phi} stays below {level!r}; no preimage", witness=(level,))
    return bisect_decreasing(lambda a: level - phi(a), 0.0, hi, tol)


def cap_construction(phi, eps):
    """Replace φ on [0, a), a = φ⁻¹(ε/2), by the line of slope φ'₊(a) through (a, φ(a)).

    The unshifted cap satisfies φ ≤ raw ≤ φ + ε/2; the returned transform is
    the cap minus its value at 0. Dilations come back unchanged.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if isinstance(phi, Dilation):
        return phi
    a = inverse_value(phi, 0.5 * eps)
    if a <= 0:
        raise BracketFailure(f"preimage of {eps / 2!r} collapsed to 0", witness=(eps,))
    m = one_sided_derivative(phi, a, "right", h0=a / 4).value
    return CappedTransform(phi, float(a), float(m), float(phi(a)))

