"""Weighted arithmetic and geometric operator means."""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite, NotPSD
from .functions import Power
from .matcore import apply_function, as_symmetric, eigvalsh

STRICT_MARGIN = 1e-10
PSD_TOL = 1e-10


def check_weight(v: float) -> float:
    v = float(v)
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"weight v={v} outside [0, 1]")
    return v


def arith_mean(a, b, v: float) -> np.ndarray:
    """``A nabla_v B = (1 - v) A + v B``."""
    a = as_symmetric(a)
    b = as_symmetric(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    v = check_weight(v)
    return as_symmetric((1.0 - v) * a + v * b)


def geom_mean(a, b, v: float) -> np.ndarray:
    """``A #_v B = A^{1/2} (A^{-1/2} B A^{-1/2})^v A^{1/2}``.

    ``A`` must be strictly positive (smallest eigenvalue above
    ``1e-10 * ||A||``) and ``B`` positive semidefinite.
    """
    a = as_symmetric(a)
    b = as_symmetric(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    v = check_weight(v)
    wa = eigvalsh(a)
    if wa[0] <= STRICT_MARGIN * max(abs(wa[0]), abs(wa[-1])):
        raise NotPositiveDefinite(f"A has smallest eigenvalue {wa[0]:.3e}")
    wb = eigvalsh(b)
    if wb[0] < -PSD_TOL * max(1.0, abs(wb[0]), abs(wb[-1])):
        raise NotPSD(f"B has smallest eigenvalue {wb[0]:.3e}")
    if v == 0.0:
        return a
    if v == 1.0:
        return b
    half = apply_function(a, Power(0.5))
    inv_half = apply_function(a, Power(-0.5))
    inner = as_symmetric(inv_half @ b @ inv_half)
    # inner is PSD in exact arithmetic; Power(v) clips rounding-level negatives
    return as_symmetric(half @ apply_function(inner, Power(v)) @ half)
