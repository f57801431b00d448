"""Backend selection for the hot kernels.

``OTREG_BACKEND`` chooses the implementation:
  - ``numba`` (default when numba is importable): @njit-compiled loops
  - ``numpy``: pure-numpy fallback
  - ``auto``: numba if available, numpy otherwise
"""

import os

_requested = os.environ.get("OTREG_BACKEND", "auto").lower()
if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(f"OTREG_BACKEND must be auto|numba|numpy, got {_requested!r}")

if _requested == "numpy":
    from . import _numpy as _k
    BACKEND = "numpy"
else:
    try:
        from . import _numba as _k
        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import _numpy as _k
        BACKEND = "numpy"

clip_cells = _k.clip_cells
eval_argmax = _k.eval_argmax
edge_lengths = _k.edge_lengths

__all__ = ["clip_cells", "eval_argmax", "edge_lengths", "BACKEND"]
