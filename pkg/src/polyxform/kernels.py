"""Backend selection for the hot kernels.

The compiled extension is used when it imports; set ``POLYXFORM_PURE_PYTHON=1``
to force the NumPy implementations.  ``BACKEND`` names the active one.
"""
import os

from . import _kernels_py

if os.environ.get("POLYXFORM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

grid_lookup = _impl.grid_lookup
interp_linear = _impl.interp_linear
vandermonde_abs_sum = _impl.vandermonde_abs_sum

__all__ = ["BACKEND", "grid_lookup", "interp_linear", "vandermonde_abs_sum"]
