"""ALS kernel backend selection.

Prefers the compiled extension when it imported cleanly; otherwise falls
back to the pure-NumPy implementation with identical semantics.  Set
``AMREC_PURE_PYTHON=1`` to force the fallback (used by the benchmark to
compare the two).
"""

import os

from amrec.kernels import als_py

if os.environ.get("AMREC_PURE_PYTHON", "") not in ("", "0"):
    _impl = als_py
    BACKEND = "python"
else:
    try:
        from amrec.kernels import _als as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = als_py
        BACKEND = "python"

half_sweep = _impl.half_sweep

# Always-available reference kernel, regardless of the chosen backend.
pure_half_sweep = als_py.half_sweep
