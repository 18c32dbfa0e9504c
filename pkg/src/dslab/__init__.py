"""Exact and Monte Carlo tools for inhomogeneous Duffin-Schaeffer type problems."""
import sys

# continued-fraction denominators and certificates routinely exceed 4300 digits
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

from ._accel import BACKEND  # noqa: E402

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
