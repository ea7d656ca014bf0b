"""Backend selection for the per-slot hot kernels.

Prefers the compiled Cython extension, falling back to the pure-numpy
twin.  Set UAVFLOW_FORCE_PY=1 to force the fallback (used by tests and
the benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("UAVFLOW_FORCE_PY"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
sparsemax_batch = _impl.sparsemax_batch
pair_gains = _impl.pair_gains
sinr_table = _impl.sinr_table
