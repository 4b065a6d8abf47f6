"""Dispatch for the hot loops: compiled int64 core or pure-Python fallback.

The compiled extension is optional.  It is used when it imported and the
operands fit comfortably in int64; otherwise the Python-integer versions
run.  Setting ``KAKUTANI_PURE=1`` forces the fallback everywhere.
"""

import os

from . import _purekernels

try:
    if os.environ.get("KAKUTANI_PURE"):
        raise ImportError("pure mode requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"

_LIMIT = 2**62


def _impl(fits: bool, force: str = None):
    if force == "python" or _ckernels is None or not fits:
        return _purekernels
    return _ckernels


def scaled_endpoints(A, C, Q, D, T, count, depth, backend=None):
    """Returns a list of ints (fallback) or an int64 array (compiled)."""
    mod = _impl(D * Q < _LIMIT, backend)
    return mod.scaled_endpoints(A, C, Q, D, T, count, depth)


def discrepancy_fast(nums, D, backend=None):
    mod = _impl((2 * len(nums) + 1) * D < _LIMIT, backend)
    return mod.discrepancy_fast(nums, D)


def discrepancy_bruteforce(nums, D, backend=None):
    mod = _impl((2 * len(nums) + 1) * D < _LIMIT, backend)
    return mod.discrepancy_bruteforce(nums, D)
