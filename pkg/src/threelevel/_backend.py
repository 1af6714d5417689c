"""Select the kernel implementation at import time.

The compiled ``_ckernels`` module is used when it was built; otherwise the
numpy fallback.  ``THREELEVEL_BACKEND=python`` forces the fallback.
"""
import os

from . import _pykernels

if os.environ.get("THREELEVEL_BACKEND", "").strip().lower() == "python":
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        kernels = _pykernels
        BACKEND = "python"
    else:
        BACKEND = "cython"

STATE_CODES = {"exact": kernels.STATE_EXACT, "large_detuning": kernels.STATE_LARGE_DETUNING}
