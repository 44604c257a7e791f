"""Pick the compiled kernels when available, else the numpy fallback.

Set ``DEADLINE_SCHED_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("DEADLINE_SCHED_PURE", "") not in ("", "0"):
    kernels = _kernels_py
else:
    try:
        from . import _kernels_c as kernels
    except ImportError:
        kernels = _kernels_py

BACKEND = "cython" if kernels is not _kernels_py else "python"
