"""Numeric kernel backend selection.

The compiled extension is preferred; the pure-Python module is the
fallback.  Both produce bit-identical results, so the choice only affects
speed.  Set SOFTFINGER_PURE=1 to force the fallback.
"""

import os

if os.environ.get("SOFTFINGER_PURE"):
    from softfinger._kernels import pure as kernels

    BACKEND = "pure"
else:
    try:
        from softfinger._kernels import _fast as kernels

        BACKEND = "compiled"
    except ImportError:
        from softfinger._kernels import pure as kernels

        BACKEND = "pure"

__all__ = ["kernels", "BACKEND"]
