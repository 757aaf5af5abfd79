"""Kernel backend selection: compiled if importable, else pure Python.

Set ``FRACVAR_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from fracvar import _pykernels

# numpy's correlate already beats a compiled double loop for the filter sums
# (see benchmarks/bench_kernels.py), so only the Euler recursion is compiled
euler_callable = _pykernels.euler_callable
filtered_square_sum = _pykernels.filtered_square_sum

BACKEND = "python"
euler_registry = _pykernels.euler_registry

if os.environ.get("FRACVAR_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from fracvar import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"
        euler_registry = _ckernels.euler_registry
