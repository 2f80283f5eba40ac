"""Metric transforms φ: catalog, evaluation, application and sampled diagnostics.

A transform is any object with ``__call__`` mapping t ≥ 0 (scalar or array)
to φ(t) ≥ 0 with φ(0) = 0. The catalog kinds are frozen dataclasses; each
knows its compact text form (``log1p:1``, ``snowflake:0.5``, ...).
"""
import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import TransformNotMetricOnThisSpace, TransformSpecError
from .metric_core import FiniteMetricSpace, triangle_defect, triangle_tolerance


class TransformSpec:
    """Base class of the transform catalog.

    Subclasses implement ``_eval`` on float arrays. ``concave`` marks kinds
    that are concave on [0, ∞) and ``metric_transform`` kinds that are known
    metric transforms for their current parameters.
    """

    concave = False

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0) or np.any(np.isnan(arr)):
            raise ValueError("metric transforms are defined on t >= 0 only")
        out = self._eval(arr)
        if out.ndim == 0:
            return float(out)
        return out

    def _eval(self, t):
        raise NotImplementedError

    @property
    def metric_transform(self):
        return True

    @property
    def text(self):
        raise NotImplementedError

    def __str__(self):
        try:
            return self.text
        except TransformSpecError:
            return repr(self)


def _fmt(x):
    return format(float(x), ".17g")


def _short(x):
    """Shortest round-trip form, used in the text grammar."""
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def _require(cond, message):
    if not cond:
        raise TransformSpecError(message)


@dataclass(frozen=True)
class Dilation(TransformSpec):
    lam: float
    concave = True

    def __post_init__(self):
        _require(self.lam > 0, f"dilation factor must be positive, got {self.lam}")

    def _eval(self, t):
        return self.lam * t

    @property
    def text(self):
        return f"dilation:{_short(self.lam)}"


@dataclass(frozen=True)
class Snowflake(TransformSpec):
    alpha: float
    concave = True

    def __post_init__(self):
        _require(0 < self.alpha <= 1, f"snowflake exponent must be in (0, 1], got {self.alpha}")

    def _eval(self, t):
        return np.power(t, self.alpha)

    @property
    def text(self):
        return f"snowflake:{_short(self.alpha)}"


@dataclass(frozen=True)
class LogOnePlus(TransformSpec):
    """c·log(1 + t/c)."""

    c: float = 1.0
    concave = True

    def __post_init__(self):
        _require(self.c > 0, f"log1p scale must be positive, got {self.c}")

    def _eval(self, t):
        return self.c * np.log1p(t / self.c)

    @property
    def text(self):
        return f"log1p:{_short(self.c)}"


@dataclass(frozen=True)
class AffineSine(TransformSpec):
    """a·t + b·|sin t|; a metric transform exactly when a ≥ b."""

    a: float
    b: float

    def __post_init__(self):
        _require(self.a >= 0 and self.b >= 0, f"affinesine needs a, b >= 0, got {self.a}, {self.b}")
        _require(self.a > 0 or self.b > 0, "affinesine with a = b = 0 is identically zero")

    @property
    def concave(self):
        return self.b == 0

    @property
    def metric_transform(self):
        return self.a >= self.b

    def _eval(self, t):
        return self.a * t + self.b * np.abs(np.sin(t))

    @property
    def text(self):
        return f"affinesine:{_short(self.a)},{_short(self.b)}"


@dataclass(frozen=True)
class LinearPlusCap(TransformSpec):
    """λ·t + β·min(t, c): a dilation plus a bounded concave part."""

    lam: float
    beta: float
    cap: float
    concave = True

    def __post_init__(self):
        _require(self.lam > 0, f"lincap slope must be positive, got {self.lam}")
        _require(self.beta >= 0, f"lincap beta must be nonnegative, got {self.beta}")
        _require(self.cap > 0, f"lincap cap must be positive, got {self.cap}")

    def _eval(self, t):
        return self.lam * t + self.beta * np.minimum(t, self.cap)

    @property
    def text(self):
        return f"lincap:{_short(self.lam)},{_short(self.beta)},{_short(self.cap)}"


@dataclass(frozen=True, eq=False)
class Tabulated(TransformSpec):
    """Piecewise-linear φ through knots, extended with ``slope`` past the last knot."""

    knots: np.ndarray
    values: np.ndarray
    slope: float = 0.0
    source: str = field(default=None, compare=False)

    def __post_init__(self):
        t = np.array(self.knots, dtype=float)
        v = np.array(self.values, dtype=float)
        _require(t.ndim == 1 and t.shape == v.shape and t.size >= 2, "need >= 2 matching knots/values")
        _require(t[0] == 0 and v[0] == 0, "tabulated transform must start at (0, 0)")
        _require(bool(np.all(np.diff(t) > 0)), "knots must be strictly increasing")
        _require(bool(np.all(v >= 0)), "tabulated values must be nonnegative")
        _require(self.slope >= 0, f"extrapolation slope must be nonnegative, got {self.slope}")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "knots", t)
        object.__setattr__(self, "values", v)

    @property
    def concave(self):
        s = np.diff(self.values) / np.diff(self.knots)
        s = np.append(s, self.slope)
        return bool(np.all(np.diff(s) <= 1e-12 * max(1.0, float(np.abs(s).max()))))

    @property
    def metric_transform(self):
        # nondecreasing + subadditive (concave through 0) is sufficient
        return self.concave and bool(np.all(np.diff(self.values) >= 0)) and self.values[1:].min() > 0

    def _eval(self, t):
        out = np.interp(t, self.knots, self.values)
        beyond = t > self.knots[-1]
        if np.any(beyond):
            out = np.where(beyond, self.values[-1] + self.slope * (t - self.knots[-1]), out)
        return out

    @classmethod
    def from_function(cls, func, knots, slope=None):
        t = np.asarray(knots, dtype=float)
        v = np.asarray(func(t), dtype=float)
        if slope is None:
            slope = max(0.0, float((v[-1] - v[-2]) / (t[-1] - t[-2])))
        return cls(t, v, slope)

    @classmethod
    def from_csv(cls, path, slope=None):
        t, v = read_knots(path)
        if slope is None:
            slope = max(0.0, float((v[-1] - v[-2]) / (t[-1] - t[-2])))
        return cls(t, v, slope, source=str(path))

    @property
    def text(self):
        if self.source is None:
            raise TransformSpecError("tabulated transform has no backing file; export it with write_knots")
        return f"tab:@{self.source},{_short(self.slope)}"


@dataclass(frozen=True)
class Scaled(TransformSpec):
    """c·φ(t), i.e. Dilation(c) composed after φ."""

    factor: float
    inner: TransformSpec

    def __post_init__(self):
        _require(self.factor > 0, f"scale factor must be positive, got {self.factor}")

    @property
    def concave(self):
        return self.inner.concave

    @property
    def metric_transform(self):
        return self.inner.metric_transform

    def _eval(self, t):
        return self.factor * np.asarray(self.inner._eval(t), dtype=float)

    @property
    def text(self):
        return f"scaled:{_short(self.factor)}*{self.inner.text}"


def evaluate(phi, t):
    """φ(t); raises ValueError for t < 0."""
    return phi(t)


def read_knots(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or set(rows[0]) != {"t", "phi"}:
        raise TransformSpecError(f"{path}: expected a CSV with header 't,phi'")
    t = np.array([float(r["t"]) for r in rows])
    v = np.array([float(r["phi"]) for r in rows])
    return t, v


def write_knots(path, t, v):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("t,phi\n")
        for a, b in zip(t, v):
            fh.write(f"{_fmt(a)},{_fmt(b)}\n")


_KINDS = {
    "dilation": (Dilation, 1),
    "snowflake": (Snowflake, 1),
    "log1p": (LogOnePlus, (0, 1)),
    "affinesine": (AffineSine, 2),
    "lincap": (LinearPlusCap, 3),
}


def parse_transform(text, base_dir=None):
    """Parse the compact form, e.g. ``log1p:1``, ``lincap:2,1,5``, ``tab:@knots.csv``.

    ``scaled:C*SPEC`` wraps SPEC as C·φ. A tabulated spec may carry an
    extrapolation slope, ``tab:@knots.csv,0.5``; by default the slope of the
    last segment (clamped at 0) is used.
    """
    text = text.strip()
    name, sep, args = text.partition(":")
    name = name.lower()
    if not sep:
        if name == "log1p":
            return LogOnePlus()
        raise TransformSpecError(f"cannot parse transform {text!r}: expected KIND:ARGS")
    if name == "scaled":
        factor, star, inner = args.partition("*")
        if not star:
            raise TransformSpecError(f"cannot parse {text!r}: expected scaled:C*SPEC")
        return Scaled(_float(factor, text), parse_transform(inner, base_dir))
    if name == "tab":
        if not args.startswith("@"):
            raise TransformSpecError(f"cannot parse {text!r}: expected tab:@FILE.csv")
        path, _, slope = args[1:].partition(",")
        p = Path(path)
        if base_dir is not None and not p.is_absolute():
            p = Path(base_dir) / p
        if not p.exists():
            raise TransformSpecError(f"knot file {str(p)!r} does not exist")
        return Tabulated.from_csv(p, None if not slope else _float(slope, text))
    if name not in _KINDS:
        raise TransformSpecError(f"unknown transform kind {name!r} in {text!r}")
    cls, arity = _KINDS[name]
    values = [_float(a, text) for a in args.split(",")] if args else []
    allowed = arity if isinstance(arity, tuple) else (arity,)
    if len(values) not in allowed:
        raise TransformSpecError(f"{name} takes {arity} argument(s), got {len(values)} in {text!r}")
    return cls(*values)


def _float(s, text):
    try:
        return float(s)
    except ValueError:
        raise TransformSpecError(f"bad number {s!r} in transform {text!r}") from None


@dataclass(frozen=True)
class GridSpec:
    """Sample points on [0, t_max]: uniform, or 0 followed by a geometric run from t_min."""

    t_max: float
    count: int
    spacing: str = "uniform"
    t_min: float = None

    def __post_init__(self):
        if self.spacing not in ("uniform", "geometric"):
            raise ValueError(f"spacing must be 'uniform' or 'geometric', got {self.spacing!r}")
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"count must be an integer >= 2, got {self.count}")
        if self.spacing == "geometric":
            if self.t_min is None or not 0 < self.t_min < self.t_max:
                raise ValueError(f"geometric grid needs 0 < t_min < t_max, got t_min={self.t_min}")
            if self.count < 3:
                raise ValueError("geometric grid needs count >= 3 (0, t_min, ..., t_max)")

    @classmethod
    def uniform(cls, t_max, count):
        return cls(float(t_max), int(count))

    @classmethod
    def geometric(cls, t_min, t_max, count):
        return cls(float(t_max), int(count), "geometric", float(t_min))

    def points(self):
        if self.spacing == "uniform":
            pts = np.linspace(0.0, self.t_max, self.count)
        else:
            m = self.count - 1
            # powers of one ratio, so dyadic grids come out exact
            ratio = (self.t_max / self.t_min) ** (1.0 / (m - 1))
            run = self.t_min * ratio ** np.arange(m)
            run[0], run[-1] = self.t_min, self.t_max
            pts = np.concatenate(([0.0], run))
        pts[-1] = self.t_max
        return pts

    @property
    def text(self):
        if self.spacing == "uniform":
            return f"uniform:{_short(self.t_max)},{self.count}"
        return f"geom:{_short(self.t_min)},{_short(self.t_max)},{self.count}"


def parse_grid(text):
    """``uniform:T,N`` or ``geom:TMIN,T,N``."""
    name, _, args = text.strip().partition(":")
    parts = args.split(",")
    try:
        if name in ("uniform", "unif") and len(parts) == 2:
            return GridSpec.uniform(float(parts[0]), int(float(parts[1])))
        if name in ("geom", "geometric") and len(parts) == 3:
            return GridSpec.geometric(float(parts[0]), float(parts[1]), int(float(parts[2])))
    except ValueError as exc:
        raise TransformSpecError(f"bad grid {text!r}: {exc}") from None
    raise TransformSpecError(f"cannot parse grid {text!r}: expected uniform:T,N or geom:TMIN,T,N")


def _grid_points(grid):
    return grid.points() if isinstance(grid, GridSpec) else np.asarray(grid, dtype=float)


def apply_transform(X, phi):
    """(X, φ∘d), validated: raises TransformNotMetricOnThisSpace with a witness triple."""
    d = np.asarray(phi(X.dist), dtype=float)
    np.fill_diagonal(d, 0.0)
    off = ~np.eye(X.n, dtype=bool)
    if np.any(d[off] <= 0):
        i, j = (int(v) for v in np.argwhere((d <= 0) & off)[0])
        raise TransformNotMetricOnThisSpace(
            f"{phi} maps d({i},{j}) = {X.dist[i, j]!r} to {d[i, j]!r}", witness=(i, j)
        )
    defect, wit = triangle_defect(d)
    if defect > triangle_tolerance(d):
        raise TransformNotMetricOnThisSpace(
            f"{phi} breaks the triangle inequality by {defect!r} at triple {wit}", witness=wit
        )
    return FiniteMetricSpace(d, X.labels)


def subadditivity_defect(phi, grid):
    """max over grid pairs t ≤ s of max(0, φ(t+s) − φ(t) − φ(s)), with the pair."""
    t = _grid_points(grid)
    v = phi(t)
    gap = phi(t[:, None] + t[None, :]) - v[:, None] - v[None, :]
    gap[np.tril_indices(t.size, -1)] = -np.inf
    return _argmax_pair(gap, t)


def nondecreasing_defect(phi, grid):
    """η̂ = max over grid pairs t ≤ s of max(0, φ(t) − φ(s)), with the pair."""
    t = _grid_points(grid)
    v = np.asarray(phi(t), dtype=float)
    run = np.maximum.accumulate(v)
    drop = run - v
    s = int(np.argmax(drop))
    if drop[s] <= 0:
        return 0.0, (float(t[0]), float(t[0]))
    first = int(np.flatnonzero(v[: s + 1] == run[s])[0])
    return float(drop[s]), (float(t[first]), float(t[s]))


def _argmax_pair(table, t):
    p = int(np.argmax(table))
    i, j = np.unravel_index(p, table.shape)
    value = float(table[i, j])
    if value <= 0:
        return 0.0, (float(t[0]), float(t[0]))
    return value, (float(t[i]), float(t[j]))


def triplet_violation(phi, a, b, c):
    """How far (φ(a), φ(b), φ(c)) is from being a triangle triplet (0 if it is one)."""
    x, y, z = phi(np.asarray([a, b, c], dtype=float))
    return max(0.0, x - y - z, y - x - z, z - x - y)


def triplet_preservation_check(phi, samples, seed=0, scale=10.0):
    """Random triangle triplets (a, b, c) pushed through φ.

    a, b are uniform on [0, scale] and c uniform on [|a − b|, a + b]. Returns
    the largest triangle-triplet violation of (φ(a), φ(b), φ(c)) and the
    offending (a, b, c); 0 is consistent with φ being a metric transform.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, scale, samples)
    b = rng.uniform(0.0, scale, samples)
    c = rng.uniform(np.abs(a - b), a + b)
    fa, fb, fc = phi(a), phi(b), phi(c)
    viol = np.maximum.reduce([np.zeros(samples), fa - fb - fc, fb - fa - fc, fc - fa - fb])
    p = int(np.argmax(viol))
    return float(viol[p]), (float(a[p]), float(b[p]), float(c[p]))


def difference_defect(phi, grid):
    """max over grid pairs of |φ(t) − φ(s)| − φ(|t − s|), clamped at 0."""
    t = _grid_points(grid)
    v = phi(t)
    gap = np.abs(v[:, None] - v[None, :]) - phi(np.abs(t[:, None] - t[None, :]))
    return _argmax_pair(gap, t)
