"""Backend selection for the commutator kernels.

The compiled extension is preferred; set ``DDVV_PURE_PYTHON=1`` to force the
numpy fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("DDVV_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

commutator_norms = _impl.commutator_norms
commutator_grad = _impl.commutator_grad

__all__ = ["BACKEND", "commutator_norms", "commutator_grad"]
