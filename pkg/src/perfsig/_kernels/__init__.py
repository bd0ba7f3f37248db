"""Kernel backend selection.

The compiled core is preferred when it imported cleanly; setting
PERFSIG_PURE_PYTHON=1 forces the NumPy fallback (useful for benchmarking
and for debugging suspected kernel issues). The active backend name is
exposed as BACKEND.
"""

import os

from . import fallback

if os.environ.get("PERFSIG_PURE_PYTHON", "") not in ("", "0"):
    _impl = fallback
else:
    try:
        from . import _native as _impl
    except ImportError:
        _impl = fallback

BACKEND = _impl.BACKEND

mean_std = _impl.mean_std
znorm = _impl.znorm
euclidean_distance = _impl.euclidean_distance
pearson = _impl.pearson
cosine = _impl.cosine
cusum_scan = _impl.cusum_scan
