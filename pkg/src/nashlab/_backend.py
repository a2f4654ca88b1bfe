"""JIT backend selection.

Kernels in :mod:`nashlab.kernels` come in two flavours: numba-compiled loops
and pure-numpy equivalents.  The numba path is used when numba imports and
``NASHLAB_DISABLE_NUMBA`` is unset (or set to ``0``/``false``).
"""

import os

_FLAG = os.environ.get("NASHLAB_DISABLE_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _FLAG not in ("", "0", "false", "no")

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not DISABLED_BY_ENV


def njit(func):
    """Compile ``func`` with numba if available, else return it unchanged."""
    if not HAS_NUMBA:
        return func
    return numba.njit(cache=True, fastmath=False)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
