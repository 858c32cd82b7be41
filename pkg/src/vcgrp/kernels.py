"""Backend dispatch for the scan kernels.

The compiled extension is used when importable; set VCGRP_FORCE_PY=1 (or
VCGRP_NO_EXT=1) to force the numpy fallback.  Both backends implement the
same integer contracts, so results are bit-identical either way.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("VCGRP_FORCE_PY") == "1" or os.environ.get("VCGRP_NO_EXT") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

max_abs_diff_rows = _impl.max_abs_diff_rows
rows_all_within = _impl.rows_all_within
convolve_counts = _impl.convolve_counts
vc_search = _impl.vc_search


def backends() -> dict:
    """All importable backends, for benchmarks and equivalence tests."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]

        found["cython"] = _kernels
    except ImportError:
        pass
    return found
