"""Optional numba acceleration.

Kernels are written once in a numba-compatible subset of Python and
decorated with :func:`njit`.  Setting ``STABILITY_LAB_NUMBA=0`` (or running
without numba installed) leaves them as plain interpreted functions; the
numerical results are the same up to floating point reassociation.
"""

import os

_FLAG = os.environ.get("STABILITY_LAB_NUMBA", "1").strip().lower()
_REQUESTED = _FLAG not in ("0", "false", "no", "off")

try:
    if not _REQUESTED:
        raise ImportError
    import numba as _numba
except ImportError:
    _numba = None

NUMBA_ENABLED = _numba is not None


def njit(func):
    if _numba is None:
        return func
    return _numba.njit(cache=True)(func)
