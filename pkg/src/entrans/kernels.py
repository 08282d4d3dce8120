"""Backend selection for the matrix-free Hamiltonian kernel.

The compiled Cython kernel is used when it was built; otherwise the numpy
fallback.  Set ``ENTRANS_BACKEND=python`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
apply_terms = _pykernels.apply_terms

if os.environ.get("ENTRANS_BACKEND", "").lower() not in ("python", "numpy"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        apply_terms = _ckernels.apply_terms
        BACKEND = "cython"

python_apply_terms = _pykernels.apply_terms

__all__ = ["BACKEND", "apply_terms", "python_apply_terms"]
