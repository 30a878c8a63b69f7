"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise the
NumPy fallback takes over with identical semantics. Set ``SIGDIST_PURE_PYTHON``
to a non-empty value before import to force the fallback (used by the
benchmark and the test suite).
"""

import os

from . import _kernels_py

if os.environ.get("SIGDIST_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

kde_log_density = _impl.kde_log_density
mixture_log_density = _impl.mixture_log_density
