"""Kernel selection and deterministic parallel reduction.

The compiled kernels are used when the extension imports; otherwise the numpy
fallback is used. Setting ``GROMOVLAB_BACKEND=python`` forces the fallback.
"""
import os
from concurrent.futures import ThreadPoolExecutor
from types import SimpleNamespace

import numpy as np

from . import _fallback

_NAMES = ("fourpoint_max", "gromov_max", "ultra_max", "triangle_max")


def _load(module):
    return SimpleNamespace(**{name: getattr(module, name) for name in _NAMES})


BACKENDS = {"python": _load(_fallback)}

try:
    from . import _kernels
except ImportError:
    _kernels = None
else:
    BACKENDS["cython"] = _load(_kernels)

if os.environ.get("GROMOVLAB_BACKEND", "").lower() == "python" or _kernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"


def kernels(backend=None):
    """Return the kernel namespace for ``backend`` (default: the active one)."""
    name = BACKEND if backend is None else backend
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} is not available; have {sorted(BACKENDS)}") from None


def partition(n, workers):
    """Split ``range(n)`` into ``workers`` ascending index arrays.

    Leading indices are dealt out in snake order so that the cheap (large)
    and expensive (small) first indices spread evenly across workers.
    """
    workers = max(1, min(int(workers), max(n, 1)))
    parts = [[] for _ in range(workers)]
    for i in range(n):
        r, p = divmod(i, workers)
        parts[p if r % 2 == 0 else workers - 1 - p].append(i)
    return [np.asarray(p, dtype=np.intp) for p in parts]


def reduce_max(d, kernel_name, workers=1, backend=None):
    """Run a kernel over all leading indices and reduce deterministically.

    The result is the maximum value and, among tuples that reach it, the
    lexicographically smallest witness, independent of ``workers``.
    """
    kern = getattr(kernels(backend), kernel_name)
    d = np.ascontiguousarray(d, dtype=np.float64)
    parts = partition(d.shape[0], workers)
    if len(parts) == 1:
        results = [kern(d, parts[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            results = list(pool.map(lambda p: kern(d, p), parts))
    best, wit = -np.inf, None
    for value, witness in results:
        if witness is None:
            continue
        if value > best or (value == best and witness < wit):
            best, wit = value, witness
    return best, wit
