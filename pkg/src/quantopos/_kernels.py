"""Kernel backend selection.

The compiled extension is used when it was built and importable; setting
``QUANTOPOS_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

import os

from . import _kernels_py as python_backend

try:
    if os.environ.get("QUANTOPOS_PURE_PYTHON"):
        raise ImportError("pure Python backend requested")
    from . import _ckernels as compiled_backend
except ImportError:
    compiled_backend = None

_active = compiled_backend or python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

enumerate_assignments = _active.enumerate_assignments
enumerate_downsets = _active.enumerate_downsets
