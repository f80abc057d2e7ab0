"""Hot loops. The compiled kernel is used when it was built, unless the
environment variable ``XMJACOBI_PURE_PYTHON`` is set to a non-empty value."""

import os

import numpy as np

from ._pynumerov import numerov as numerov_python

try:
    from ._cnumerov import numerov as numerov_compiled
except ImportError:  # extension not built
    numerov_compiled = None

RESCALE_LIMIT = 1e150

if numerov_compiled is not None and not os.environ.get("XMJACOBI_PURE_PYTHON"):
    BACKEND = "cython"
    _impl = numerov_compiled
else:
    BACKEND = "python"
    _impl = numerov_python


def numerov(f, psi, h2, limit=RESCALE_LIMIT):
    """Run the selected backend on float64 contiguous arrays (``psi`` in place)."""
    f = np.ascontiguousarray(f, dtype=float)
    if not (isinstance(psi, np.ndarray) and psi.dtype == float and psi.flags.c_contiguous):
        raise TypeError("psi must be a contiguous float64 array")
    return _impl(f, psi, float(h2), float(limit))
