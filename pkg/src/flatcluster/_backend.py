"""Backend selection and thread control for the hot pair kernel.

Two interchangeable kernels exist: a numba @njit one (parallel, cached) and
a pure-numpy reference. Selection order:

  1. env var FLATCLUSTER_BACKEND = "numba" | "numpy" (anything else errors);
  2. default: numba when importable, else numpy.

FLATCLUSTER_THREADS caps the numba worker count (0 or unset = auto, meaning
numba's own maximum). Requests are clamped to [1, numba's max]; the numpy
backend is single-threaded apart from BLAS internals and ignores the flag.
Both backends agree to ~1e-12; each is deterministic for fixed inputs and
any thread count, because every pair writes only its own output slots.
"""

from __future__ import annotations

import os

from .errors import InvalidInputError

from . import _kernels_numpy

try:
    from . import _kernels_numba

    _HAVE_NUMBA = True
except ImportError:  # numba missing or broken: numpy path still works
    _kernels_numba = None
    _HAVE_NUMBA = False


def backend_name() -> str:
    """Resolved backend: 'numba' or 'numpy'."""
    env = os.environ.get("FLATCLUSTER_BACKEND", "").strip().lower()
    if env == "numpy":
        return "numpy"
    if env == "numba":
        if not _HAVE_NUMBA:
            raise InvalidInputError(
                "FLATCLUSTER_BACKEND=numba but numba is not importable")
        return "numba"
    if env:
        raise InvalidInputError(
            f"FLATCLUSTER_BACKEND must be 'numba' or 'numpy', got {env!r}")
    return "numba" if _HAVE_NUMBA else "numpy"


def _requested_threads() -> int:
    raw = os.environ.get("FLATCLUSTER_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise InvalidInputError(
            f"FLATCLUSTER_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise InvalidInputError("FLATCLUSTER_THREADS must be >= 0")
    return n


def _apply_thread_limit() -> None:
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    n = _requested_threads()
    if n == 0:
        n = limit
    numba.set_num_threads(max(1, min(n, limit)))


def get_pair_kernel():
    """Return the active kernel function, applying thread settings."""
    if backend_name() == "numba":
        _apply_thread_limit()
        return _kernels_numba.pair_kernel
    return _kernels_numpy.pair_kernel
