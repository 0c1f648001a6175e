"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the
pure-numpy fallback is used.  Both produce bit-identical results, so the
choice only affects speed.  Set MPBOOST_BACKEND=python to force the
fallback, or MPBOOST_BACKEND=cython to fail loudly when the extension is
missing.
"""

import os

_requested = os.environ.get("MPBOOST_BACKEND", "").strip().lower()

if _requested == "python":
    from . import _pykernels as _kernels

    BACKEND = "python"
elif _requested == "cython":
    from . import _ckernels as _kernels

    BACKEND = "cython"
elif _requested:
    raise ValueError(f"unknown MPBOOST_BACKEND value: {_requested!r}")
else:
    try:
        from . import _ckernels as _kernels

        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as _kernels

        BACKEND = "python"

best_split = _kernels.best_split
apply_tree = _kernels.apply_tree
