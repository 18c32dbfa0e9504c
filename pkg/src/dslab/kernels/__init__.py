"""Kernel dispatch: numba when available and not disabled, numpy otherwise."""
from __future__ import annotations

from .. import _accel
from . import _np

if _accel.USE_NUMBA:
    from . import _nb as active
else:
    active = _np

BACKEND = _accel.BACKEND
NAMES = ("iq_counts", "f_table", "hc_sweep", "arc_components", "mc_hits", "orbit_hits")


def backend(name: str | None = None):
    """Return the kernel module for ``name`` ('numba' or 'numpy'); default is the active one."""
    if name is None:
        return active
    if name == "numpy":
        return _np
    if name == "numba":
        if not _accel.HAS_NUMBA:
            raise RuntimeError("numba is not installed")
        from . import _nb
        return _nb
    raise ValueError(f"unknown backend {name!r}")


iq_counts = active.iq_counts
f_table = active.f_table
hc_sweep = active.hc_sweep
arc_components = active.arc_components
mc_hits = active.mc_hits
orbit_hits = active.orbit_hits
