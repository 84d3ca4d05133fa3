"""Kernel backend selection.

The compiled extension is used when it imports; set ``BGND_PURE_PYTHON=1`` to
force the pure-Python fallback.
"""

import os

from . import _kernels_py

if os.environ.get("BGND_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
pb_pmf = _impl.pb_pmf
search_min_profile = _impl.search_min_profile

__all__ = ["BACKEND", "pb_pmf", "search_min_profile"]
