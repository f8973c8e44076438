"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it was built; otherwise,
or when the environment variable ``NEMX_PURE_PYTHON`` is set to a non-empty
value, the pure Python ``_pykernels`` module is used.  Both expose the same
functions and produce identical results.
"""

from __future__ import annotations

import os

from nemx import _pykernels

if os.environ.get("NEMX_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from nemx import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

ZONE_CONSUMPTION = _pykernels.ZONE_CONSUMPTION
ZONE_NET_ZERO = _pykernels.ZONE_NET_ZERO
ZONE_PRODUCTION = _pykernels.ZONE_PRODUCTION

clamped_demand = _impl.clamped_demand
net_zero_price = _impl.net_zero_price
schedule_batch = _impl.schedule_batch
maxplus_convolve = _impl.maxplus_convolve


def compiled_available() -> bool:
    try:
        from nemx import _ckernels  # noqa: F401
    except ImportError:
        return False
    return True
