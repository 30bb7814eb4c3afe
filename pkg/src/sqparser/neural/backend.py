"""Kernel backend selection.

The LSTM recurrence kernels exist twice: a numba-jitted version and a
pure-numpy fallback.  ``SQPARSER_BACKEND=numpy`` forces the fallback;
``SQPARSER_BACKEND=numba`` requires numba and fails loudly if it is
missing.  By default numba is used when importable.
"""

import logging
import os

log = logging.getLogger(__name__)

_ENV = "SQPARSER_BACKEND"


def _select():
    choice = os.environ.get(_ENV, "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(f"{_ENV} must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numpy":
        from . import kernels_numpy
        return kernels_numpy, "numpy"
    try:
        from . import kernels_numba
        return kernels_numba, "numba"
    except ImportError:
        if choice == "numba":
            raise
        log.warning("numba unavailable, falling back to numpy kernels")
        from . import kernels_numpy
        return kernels_numpy, "numpy"


kernels, BACKEND = _select()
