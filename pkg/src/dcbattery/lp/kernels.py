"""Pick the tableau kernel backend at import time.

The compiled extension is used when it has been built; otherwise the numpy
fallback. Set ``DCBATTERY_KERNEL=python`` to force the fallback.
"""

import os

from . import _pykernel

BACKEND = "python"
_impl = _pykernel

if os.environ.get("DCBATTERY_KERNEL", "").lower() != "python":
    try:
        from . import _ckernel as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

pivot = _impl.pivot
price_dantzig = _impl.price_dantzig
price_bland = _impl.price_bland
ratio_test = _impl.ratio_test


def get(name: str):
    """Return the kernel module named ``"python"`` or ``"cython"``."""
    if name == "python":
        return _pykernel
    if name == "cython":
        from . import _ckernel

        return _ckernel
    raise ValueError(f"unknown kernel backend {name!r}")
