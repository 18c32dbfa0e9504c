"""Backend switch for the compiled kernels.

Set ``DSLAB_NO_NUMBA=1`` to force the vectorised numpy implementations even
when numba is importable.
"""
from __future__ import annotations

import os

# the TBB layer shipped here is too old for numba; avoid the probe and its warning
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAS_NUMBA = False

_flag = os.environ.get("DSLAB_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag not in ("", "0", "false", "no")
USE_NUMBA = HAS_NUMBA and not NUMBA_DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


def set_threads(n: int | None) -> None:
    if n and USE_NUMBA:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
