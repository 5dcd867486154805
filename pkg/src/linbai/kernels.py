"""Kernel backend selection.

Imports the compiled extension when available, otherwise the pure-numpy
fallback. Set LINBAI_PURE_PY=1 in the environment (before import) to force
the fallback; `available_backends()` exposes both for benchmarking.
"""
from __future__ import annotations

import os

from . import _kernels_py

_impl = _kernels_py
if os.environ.get("LINBAI_PURE_PY", "").strip().lower() not in {"1", "true", "yes"}:
    try:
        from . import _speedups as _compiled

        _impl = _compiled
    except ImportError:
        pass

BACKEND = _impl.BACKEND_NAME

min_gap_ratio_scan = _impl.min_gap_ratio_scan
abs_dot_argmax = _impl.abs_dot_argmax
sphere_block_scan = _impl.sphere_block_scan


def available_backends() -> dict:
    """Name -> module for every importable backend."""
    out = {"python": _kernels_py}
    try:
        from . import _speedups as _compiled

        out["compiled"] = _compiled
    except ImportError:
        pass
    return out
