"""Selects the exploration kernel at import time.

The compiled kernel is used when it was built; ``CFSM_PURE_PYTHON=1`` forces
the reference implementation.
"""

import os

from cfsm import _kernel_py

if os.environ.get("CFSM_PURE_PYTHON"):
    explore = _kernel_py.explore
    BACKEND = "python"
else:
    try:
        from cfsm._kernel import explore
        BACKEND = "cython"
    except ImportError:
        explore = _kernel_py.explore
        BACKEND = "python"

__all__ = ["explore", "BACKEND"]
