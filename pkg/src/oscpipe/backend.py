"""Backend selection for the hot time-stepping kernels.

Two interchangeable implementations exist for every kernel: an explicit-loop
version compiled with numba's ``@njit``, and a vectorized pure-numpy fallback.
Selection happens once at import time:

* default: numba, if importable;
* ``OSCPIPE_DISABLE_NUMBA=1`` in the environment forces the numpy path
  (useful for debugging, benchmarking, or numba-less installs).

The two paths agree to roundoff (summation order differs); within one backend
results are bit-reproducible.
"""

import os

DISABLE_ENV = "OSCPIPE_DISABLE_NUMBA"


def numba_requested() -> bool:
    """True unless the user disabled numba via the environment flag."""
    flag = os.environ.get(DISABLE_ENV, "").strip().lower()
    return flag in ("", "0", "false", "no")


def resolve_backend() -> str:
    """Return 'numba' or 'numpy' depending on flag and availability."""
    if not numba_requested():
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


BACKEND = resolve_backend()
