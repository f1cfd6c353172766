"""Select the compiled kernels when available, else the pure-Python ones.

Set ``RLPLIFT_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("RLPLIFT_PURE_PYTHON"):
    from ._kernels_py import BACKEND, pivot_dense, refine_round
else:
    try:
        from ._kernels import BACKEND, pivot_dense, refine_round
    except ImportError:  # not compiled
        from ._kernels_py import BACKEND, pivot_dense, refine_round

__all__ = ["BACKEND", "pivot_dense", "refine_round"]
