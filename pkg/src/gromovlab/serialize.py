"""JSON, CSV and SVG writers shared by the library and the command line.

Floats are written with 17 significant digits so every value round-trips,
and output is byte-identical for identical inputs.
"""
import csv
import json
import math
from enum import Enum

import numpy as np

from .errors import MetricSpaceError
from .metric_core import FiniteMetricSpace


def fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _plain(obj):
    """Convert numpy scalars, enums, tuples and dataclass reports to JSON-ready values."""
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _emit(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        # short lists of scalars stay on one line
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _emit(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    return json.dumps(obj)


def dumps(obj, indent=2):
    return _emit(_plain(obj), indent, 0) + "\n"


def loads(text):
    return json.loads(text)


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt_float(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def save_distance_csv(path, X):
    """One ``i,j,d`` row per unordered pair i < j."""
    d = X.dist
    rows = [(i, j, float(d[i, j])) for i in range(X.n) for j in range(i + 1, X.n)]
    write_rows(path, ("i", "j", "d"), rows)


def load_distance_csv(path):
    """Read an ``i,j,d`` table; missing pairs are an error, a repeated pair must agree."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["i", "j", "d"]:
            raise MetricSpaceError(f"{path}: expected a CSV with header 'i,j,d'")
        entries = []
        for row in reader:
            i, j, v = int(row["i"]), int(row["j"]), float(row["d"])
            if i < 0 or j < 0:
                raise MetricSpaceError(f"{path}: negative index in row {row}", witness=(i, j))
            entries.append((i, j, v))
    n = 1 + max((max(i, j) for i, j, _ in entries), default=0)
    d = np.full((n, n), np.nan)
    np.fill_diagonal(d, 0.0)
    for i, j, v in entries:
        if i == j:
            if v != 0:
                raise MetricSpaceError(f"{path}: d({i},{i}) = {v!r}", witness=(i, i))
            continue
        if not np.isnan(d[i, j]) and d[i, j] != v:
            raise MetricSpaceError(f"{path}: conflicting values for pair ({i},{j})", witness=(i, j))
        d[i, j] = d[j, i] = v
    missing = np.argwhere(np.isnan(d))
    if missing.size:
        i, j = (int(v) for v in missing[0])
        raise MetricSpaceError(f"{path}: no distance for pair ({i},{j})", witness=(i, j))
    return FiniteMetricSpace(d)


def write_curve_csv(path, curve):
    write_rows(path, ("T", "value"), [(float(T), float(v)) for T, v in curve])


def write_sweep_csv(path, rows):
    write_rows(path, ("T", "delta", "ultra_defect"), [(r.T, r.delta, r.ultra_defect) for r in rows])


def svg_polyline(series, title="", log_x=True, width=640, height=400):
    """A static line chart: ``series`` maps a name to a list of (x, y) points."""
    margin = 50
    pts = [(x, y) for s in series.values() for x, y in s]
    if not pts:
        raise ValueError("nothing to plot")

    def fx(x):
        return math.log10(x) if log_x else x

    xs = [fx(x) for x, _ in pts]
    ys = [y for _, y in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(x):
        return margin + (fx(x) - x0) / (x1 - x0) * (width - 2 * margin)

    def py(y):
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 10}" text-anchor="middle" font-size="12">'
        f'{"log10 T" if log_x else "T"}</text>',
        f'<text x="5" y="{margin - 10}" font-size="11">{y1:.6g}</text>',
        f'<text x="5" y="{height - margin}" font-size="11">{y0:.6g}</text>',
    ]
    for k, (name, s) in enumerate(series.items()):
        color = colors[k % len(colors)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in s)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        out.append(
            f'<text x="{width - margin - 120}" y="{margin + 15 * (k + 1)}" font-size="12" '
            f'fill="{color}">{name}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, series, title="", log_x=True):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg_polyline(series, title, log_x))
