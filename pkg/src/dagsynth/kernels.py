"""Split-scan backend selection.

Prefers the compiled Cython kernel when it imported cleanly; otherwise the
NumPy implementation is used. Set ``DAGSYNTH_PURE_PYTHON=1`` to force the
fallback (useful for benchmarking and debugging). Both backends implement
identical arithmetic; fitted trees may differ only on exact score ties.
"""

from __future__ import annotations

import os

from . import _scan_py

if os.environ.get("DAGSYNTH_PURE_PYTHON", "") not in ("", "0"):
    _impl = _scan_py
else:
    try:
        from . import _splitscan as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _scan_py

BACKEND = _impl.BACKEND_NAME
scan_splits = _impl.scan_splits
dm_log_marginal = _scan_py.dm_log_marginal
