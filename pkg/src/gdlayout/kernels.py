"""Kernel backend selection.

The compiled extension (gdlayout._ext) is preferred; the numpy fallback
(gdlayout._slow) is used when the extension is missing or when the
GDLAYOUT_PURE environment variable is set to a non-empty value. Both
expose the same functions; tests run the pair head to head and
benchmarks/bench_kernels.py measures the gap.
"""

from __future__ import annotations

import os

from . import _slow

if os.environ.get("GDLAYOUT_PURE"):
    _impl = _slow
else:
    try:
        from . import _ext as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _slow

BACKEND = _impl.BACKEND

cross_mask = _impl.cross_mask
pairs_cross_bruteforce = _impl.pairs_cross_bruteforce
cross_vs = _impl.cross_vs
stress_batch = _impl.stress_batch
edge_len_batch = _impl.edge_len_batch


def backends():
    """All importable backends, compiled first (for tests/benchmarks)."""
    found = []
    try:
        from . import _ext

        found.append(_ext)
    except ImportError:
        pass
    found.append(_slow)
    return found
