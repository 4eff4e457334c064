"""Dense real symmetric matrices: spectral decomposition, functional calculus
and the Loewner order.

Matrices are plain ``numpy.ndarray`` objects. :func:`as_symmetric` validates
an input, symmetrizes away rounding-level asymmetry and returns a read-only
float64 copy; every other function accepts anything it accepts.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._backend import jacobi_eigh
from .errors import DimensionMismatch, NoConvergence, NonSymmetric

MAX_DIM = 16
SYMMETRY_TOL = 1e-12
JACOBI_REL_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
DOMAIN_MARGIN = 1e-12


def as_symmetric(a) -> np.ndarray:
    """Validate ``a`` as a real symmetric matrix and return a frozen copy.

    Asymmetry up to ``1e-12 * max(1, max|a_ij|)`` is absorbed by
    symmetrizing; anything larger raises :class:`NonSymmetric`.
    """
    if isinstance(a, np.ndarray) and not a.flags.writeable and a.dtype == np.float64:
        # already produced by this function
        return a
    arr = np.array(a, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise NonSymmetric(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonSymmetric("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(arr))))
    asym = float(np.max(np.abs(arr - arr.T)))
    if asym > SYMMETRY_TOL * scale:
        raise NonSymmetric(f"asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:g} * {scale:.3e}")
    arr = 0.5 * (arr + arr.T)
    arr.flags.writeable = False
    return arr


def identity(n: int) -> np.ndarray:
    return as_symmetric(np.eye(n))


def diag(values) -> np.ndarray:
    return as_symmetric(np.diag(np.asarray(values, dtype=np.float64)))


class SpectralDecomp(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int


def spectral_decompose(a) -> SpectralDecomp:
    """Eigen-decomposition by cyclic Jacobi rotations.

    Eigenvalues are returned in ascending order; column ``i`` of
    ``eigenvectors`` belongs to eigenvalue ``i``.
    """
    a = as_symmetric(a)
    n = a.shape[0]
    if n > MAX_DIM:
        raise DimensionMismatch(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    w, q, sweeps, converged = jacobi_eigh(
        np.ascontiguousarray(a), JACOBI_REL_TOL, JACOBI_MAX_SWEEPS
    )
    if not converged:
        raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    order = np.argsort(w, kind="stable")
    w = w[order]
    q = q[:, order]
    w.flags.writeable = False
    q.flags.writeable = False
    return SpectralDecomp(w, q, sweeps)


def eigvalsh(a) -> np.ndarray:
    return spectral_decompose(a).eigenvalues


def apply_function(a, f) -> np.ndarray:
    """Functional calculus ``f(A) = Q diag(f(lambda_i)) Q^T``.

    ``f`` is a :class:`opbell.functions.ScalarFunction` (anything exposing
    ``domain`` and a vectorized call works). Eigenvalues within the
    rounding margin of a closed domain endpoint are clipped onto it.
    """
    a = as_symmetric(a)
    w, q, _ = spectral_decompose(a)
    margin = DOMAIN_MARGIN * max(1.0, float(np.max(np.abs(w))))
    w = f.domain.admit(w, margin, what=f"eigenvalue of A for {f}")
    fw = np.asarray(f(w), dtype=np.float64)
    return as_symmetric((q * fw) @ q.T)


def operator_norm(a) -> float:
    w = eigvalsh(a)
    return float(max(abs(w[0]), abs(w[-1])))


def is_psd(a, tol: float = 1e-9) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    w = eigvalsh(a)
    scale = max(1.0, abs(w[0]), abs(w[-1]))
    return bool(w[0] >= -tol * scale)


def min_eig(a) -> float:
    return float(eigvalsh(a)[0])


def spectrum_in(a, m: float, M: float, tol: float = 1e-9) -> bool:
    if m > M:
        raise ValueError(f"empty interval [{m}, {M}]")
    w = eigvalsh(a)
    return bool(w[0] >= m - tol and w[-1] <= M + tol)


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")


class Relation(str, enum.Enum):
    LESS_EQ = "LessEq"
    GREATER_EQ = "GreaterEq"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class LoewnerVerdict:
    relation: Relation
    min_eig_ba: float
    min_eig_ab: float
    tol: float

    @property
    def less_eq(self) -> bool:
        return self.relation in (Relation.LESS_EQ, Relation.EQUAL)


def loewner_compare(a, b, tol: float = 1e-9) -> LoewnerVerdict:
    """Compare ``A`` and ``B`` in the Loewner order.

    ``tol`` is relative: it is scaled by ``max(1, ||A||, ||B||)`` and the
    scaled value is what the verdict reports.
    """
    a = as_symmetric(a)
    b = as_symmetric(b)
    _same_shape(a, b)
    w = eigvalsh(b - a)
    scale = max(1.0, operator_norm(a), operator_norm(b))
    eff = tol * scale
    min_ba = float(w[0])
    min_ab = float(-w[-1])
    le = min_ba >= -eff
    ge = min_ab >= -eff
    if le and ge:
        rel = Relation.EQUAL
    elif le:
        rel = Relation.LESS_EQ
    elif ge:
        rel = Relation.GREATER_EQ
    else:
        rel = Relation.INCOMPARABLE
    return LoewnerVerdict(rel, min_ba, min_ab, eff)


def matrix_to_json(a) -> dict:
    a = as_symmetric(a)
    return {"n": int(a.shape[0]), "rows": a.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    try:
        n = int(obj["n"])
        rows = obj["rows"]
    except (KeyError, TypeError) as exc:
        raise NonSymmetric(f"malformed matrix JSON: {obj!r}") from exc
    a = as_symmetric(rows)
    if a.shape[0] != n:
        raise DimensionMismatch(f'"n" is {n} but rows describe a {a.shape[0]}x{a.shape[0]} matrix')
    return a


__all__ = [
    "LoewnerVerdict",
    "Relation",
    "SpectralDecomp",
    "apply_function",
    "as_symmetric",
    "diag",
    "eigvalsh",
    "identity",
    "is_psd",
    "loewner_compare",
    "matrix_from_json",
    "matrix_to_json",
    "min_eig",
    "operator_norm",
    "spectral_decompose",
    "spectrum_in",
]
