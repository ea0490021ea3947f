"""Backend selection for the hot kernels.

The numba path is used when numba imports cleanly and the environment
variable ``FROGSG_DISABLE_NUMBA`` is unset (or set to ``0``).  Setting it
to ``1`` forces the pure-numpy path; this is read once at import time.
"""

import os

_DISABLE = os.environ.get("FROGSG_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLE:
        raise ImportError("numba disabled by FROGSG_DISABLE_NUMBA")
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
