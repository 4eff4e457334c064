"""Kernel selection: compiled Jacobi if importable, pure Python otherwise."""
import os

from . import _jacobi_py

if os.environ.get("OPBELL_PURE_PYTHON", "") not in ("", "0"):
    jacobi_eigh = _jacobi_py.jacobi_eigh
    BACKEND = "python"
else:
    try:
        from ._jacobi import jacobi_eigh
        BACKEND = "cython"
    except ImportError:  # extension not built
        jacobi_eigh = _jacobi_py.jacobi_eigh
        BACKEND = "python"

__all__ = ["BACKEND", "jacobi_eigh"]
