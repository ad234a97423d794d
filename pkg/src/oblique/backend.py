"""Kernel lane selection.

The hot kernels ship in two interchangeable implementations: a numba @njit
lane (used by default when numba is importable) and a pure-numpy lane.
Setting the environment variable ``OBLIQUE_PURE_NUMPY=1`` forces the numpy
lane; the choice is fixed at import time. ``benchmarks/bench_kernels.py``
compares the two.
"""

from __future__ import annotations

import os

from . import kernels_numpy

PURE_NUMPY_ENV = "OBLIQUE_PURE_NUMPY"


def _pure_numpy_requested() -> bool:
    return os.environ.get(PURE_NUMPY_ENV, "").strip().lower() in {"1", "true", "yes", "on"}


if _pure_numpy_requested():
    kernels = kernels_numpy
else:
    try:
        from . import kernels_numba as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = kernels_numpy


def active_lane() -> str:
    """Name of the kernel lane in use: ``"numba"`` or ``"numpy"``."""
    return kernels.LANE
