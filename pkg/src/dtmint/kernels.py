"""Backend selection for the hot grid kernels.

The compiled Cython module is used when it imports; otherwise (or when the
environment variable ``DTMINT_PURE_PYTHON`` is set to a non-empty value other
than ``0``) the scipy-based fallback is used.  ``BACKEND`` names the choice.
"""
import os

import numpy as np

from . import _fallback

_force_fallback = os.environ.get("DTMINT_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_fallback:
        raise ImportError("fallback forced by DTMINT_PURE_PYTHON")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _fallback
    BACKEND = "fallback"

BACKENDS = {"fallback": _fallback}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl


def _u8(a):
    return np.ascontiguousarray(a, dtype=np.uint8)


def label(mask, connectivity, impl=None):
    """Connected components of a 2-D boolean mask; returns ``(labels, count)``."""
    impl = impl or _impl
    return impl.label(_u8(mask), int(connectivity))


def geodesic_distance(sources, allowed=None, connectivity=4, impl=None):
    """BFS distance from ``sources`` through ``allowed`` (default: everywhere)."""
    impl = impl or _impl
    if allowed is None:
        allowed = np.ones(np.shape(sources), dtype=bool)
    return impl.geodesic_distance(_u8(sources), _u8(allowed), int(connectivity))
