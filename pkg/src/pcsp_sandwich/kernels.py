"""Backend selection for the enumeration kernels.

The compiled extension is used when it imports; otherwise the numpy
implementation.  Set ``PCSP_SANDWICH_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("PCSP_SANDWICH_PURE") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "compiled" if _impl is not _pykernels else "numpy"

linear_cyclic_mask = _impl.linear_cyclic_mask
tables_cyclic_mask = _impl.tables_cyclic_mask
selection_orbit_scopes = _impl.selection_orbit_scopes

__all__ = [
    "BACKEND",
    "linear_cyclic_mask",
    "tables_cyclic_mask",
    "selection_orbit_scopes",
]
