"""Selects the convolution core at import time.

The compiled Cython extension is preferred; the numpy implementation is the
fallback.  ``HEATLAB_BACKEND=python`` or ``HEATLAB_BACKEND=compiled`` forces
a choice (the latter raises if the extension is missing).
"""

import os

from . import _convkernels_py

_FORCED = os.environ.get("HEATLAB_BACKEND", "").strip().lower()

_impl = None
_name = "python"

if _FORCED not in ("", "python", "compiled"):
    raise RuntimeError(f"HEATLAB_BACKEND must be 'python' or 'compiled', got {_FORCED!r}")

if _FORCED != "python":
    try:
        from . import _convkernels as _compiled
        _impl = _compiled
        _name = "compiled"
    except ImportError:
        if _FORCED == "compiled":
            raise RuntimeError("HEATLAB_BACKEND=compiled but the extension is not built")
        _impl = None

if _impl is None:
    _impl = _convkernels_py
    _name = "python"

toeplitz_matvec = _impl.toeplitz_matvec
gauss_conv_points = _impl.gauss_conv_points


def backend_name() -> str:
    """'compiled' when the Cython core is active, else 'python'."""
    return _name
