"""Kernel backend selection.

The hot loops live twice: once as numba ``@njit`` kernels and once as plain
numpy.  ``KBF_BACKEND=numpy`` forces the numpy path; the default is numba
when it imports cleanly.
"""

import logging
import os

logger = logging.getLogger(__name__)

_requested = os.environ.get("KBF_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"KBF_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

HAVE_NUMBA = False
try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    logger.warning("numba not importable; falling back to numpy kernels")

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


def load_kernels(name=None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    name = BACKEND if name is None else name
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        from . import _kernels_numba as mod
    elif name == "numpy":
        from . import _kernels_numpy as mod
    else:
        raise ValueError(f"unknown backend {name!r}")
    return mod
