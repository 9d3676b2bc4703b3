"""Single import point for numba.

NUMBA_NUM_THREADS must be raised before numba is first imported so that
`--threads 8` works even on boxes with fewer cores; every module that
compiles kernels imports numba from here.
"""

import os

os.environ.setdefault("NUMBA_NUM_THREADS", str(max(8, os.cpu_count() or 1)))

import numba
from numba import njit, prange

__all__ = ["numba", "njit", "prange"]
