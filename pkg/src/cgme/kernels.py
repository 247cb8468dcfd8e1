"""Numerical kernel backend: compiled extension if available, numpy otherwise.

Set CGME_BACKEND=python or CGME_BACKEND=compiled to force a choice
(compiled raises ImportError when the extension was not built).
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("CGME_BACKEND", "auto").lower()
if _requested not in ("auto", "python", "compiled"):
    raise ValueError(f"CGME_BACKEND must be auto|python|compiled, got {_requested!r}")

_impl = None
if _requested in ("auto", "compiled"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "CGME_BACKEND=compiled but the cgme._kernels extension is not built"
            )
if _impl is None:
    _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "compiled"

spectral_density_array = _impl.spectral_density_array
sinc_array = _impl.sinc_array
correlation_closed = _impl.correlation_closed
spectral_sinc_panels = _impl.spectral_sinc_panels
