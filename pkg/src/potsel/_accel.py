"""Backend switch for the compiled kernels.

Set ``POTSEL_DISABLE_NUMBA=1`` before import to force the pure-numpy path.
The choice is made once, at import time.
"""

import os

_FLAG = os.environ.get("POTSEL_DISABLE_NUMBA", "").strip().lower()

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")
BACKEND = "numba" if USE_NUMBA else "numpy"
