"""Sharpness constants: the Kantorovich-type ratio constant ``K(m, M, f)``
and the additive defect constants ``beta`` and ``beta_tilde``.

``K`` compares the chord of ``f`` through ``(m, f(m))`` and ``(M, f(M))``
with ``f`` itself. For ``(1 - t)**r`` and ``exp`` the extremum sits at an
explicit stationary point; everything else goes through a dense uniform grid
(the grid is also the independent oracle for the closed forms).
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateChord, InvalidConfig, SignChange
from .functions import Affine, Exp, IntervalBounds, PowerOneMinus, ScalarFunction, Shape, shape_on

K_GRID_POINTS = 10**6
BETA_GRID_POINTS = 10**5
DEGENERATE_MU = 1e-14


class Method(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    GRID_ORACLE = "GridOracle"


class ChordCoefficients(NamedTuple):
    mu: float
    lam: float

    def __call__(self, t):
        return self.mu * t + self.lam


@dataclass(frozen=True)
class ConstantResult:
    name: str
    value: float
    argmax_t: float
    method: Method
    f: ScalarFunction
    bounds: IntervalBounds

    def to_dict(self) -> dict:
        return {
            "constant": self.name,
            "value": self.value,
            "argmax_t": self.argmax_t,
            "method": self.method.value,
            "f": self.f.spec,
            "m": self.bounds.m,
            "M": self.bounds.M,
        }


def chord(f: ScalarFunction, b: IntervalBounds) -> ChordCoefficients:
    """Slope and intercept of the secant of ``f`` over ``[m, M]``."""
    if b.degenerate:
        raise DegenerateChord(f"chord undefined on the point interval [{b.m}, {b.M}]")
    fm, fM = f(b.m), f(b.M)
    width = b.M - b.m
    if isinstance(f, Affine):
        return ChordCoefficients(float(f.a), float(f.b))
    return ChordCoefficients((fM - fm) / width, (b.M * fm - b.m * fM) / width)


class CriticalPoints(NamedTuple):
    t0: float
    t1_raw: float
    t1: float


def _clamp(t: float, b: IntervalBounds) -> float:
    return min(max(t, b.m), b.M)


def _power_points(r: float, b: IntervalBounds) -> CriticalPoints:
    mu, lam = chord(PowerOneMinus(r), b)
    if abs(mu) < DEGENERATE_MU or r == 1.0:
        raise DegenerateChord(f"chord slope {mu:.3e} too small for r={r}")
    t1 = -(lam * r + mu) / (mu * (r - 1.0))
    return CriticalPoints(-lam / mu, t1, _clamp(t1, b))


def _in_power_gap(r: float) -> bool:
    return -1.0 <= r <= 0.0 or 1.0 <= r <= 2.0


def power_critical_points(r: float, b: IntervalBounds) -> CriticalPoints:
    """Zeros of the derivative of ``((mu t + lam) / (1 - t)**r)**2``.

    ``t0 = -lam/mu`` is the zero of the chord (a minimum of the squared
    ratio); ``t1 = -(lam r + mu) / (mu (r - 1))`` is the maximizer.
    """
    if _in_power_gap(r):
        raise ValueError(f"r={r} lies in [-1, 0] U [1, 2]")
    if not 0.0 < b.m <= b.M < 1.0:
        raise ValueError(f"need 0 < m <= M < 1, got [{b.m}, {b.M}]")
    return _power_points(r, b)


def power_critical_point(r: float, b: IntervalBounds) -> float:
    return power_critical_points(r, b).t1


def _exp_points(b: IntervalBounds) -> CriticalPoints:
    mu, lam = chord(Exp(), b)
    if abs(mu) < DEGENERATE_MU:
        raise DegenerateChord(f"chord slope {mu:.3e} too small")
    t1 = (mu - lam) / mu
    return CriticalPoints(-lam / mu, t1, _clamp(t1, b))


def exp_critical_points(b: IntervalBounds) -> CriticalPoints:
    if not 0.0 < b.m <= b.M < 1.0:
        raise ValueError(f"need 0 < m <= M < 1, got [{b.m}, {b.M}]")
    return _exp_points(b)


def exp_critical_point(b: IntervalBounds) -> float:
    return exp_critical_points(b).t1


def _grid_extremum(values: np.ndarray, ts: np.ndarray, sense: str) -> tuple[float, float]:
    # np.argmax/argmin return the first index on ties: deterministic
    i = int(np.argmax(values) if sense == "max" else np.argmin(values))
    return float(values[i]), float(ts[i])


def _auto_sense(f: ScalarFunction, b: IntervalBounds) -> str:
    return "min" if shape_on(f, b) is Shape.CONCAVE else "max"


@functools.lru_cache(maxsize=512)
def kantorovich(
    f: ScalarFunction,
    b: IntervalBounds,
    method: str | None = None,
    sense: str | None = None,
) -> ConstantResult:
    """Extremal ratio ``(mu t + lam) / f(t)`` over ``t`` in ``[m, M]``.

    ``sense="max"`` is the defining maximum. With ``sense=None`` the
    maximum is used for convex (and every non-concave) ``f``, giving
    ``K >= 1``; for concave ``f`` the maximum is identically 1 and the
    minimum (``K <= 1``) is returned instead, which is the constant the
    two-sided Jensen reverse actually needs.

    ``method`` is ``"closed"``, ``"grid"`` or ``None`` (closed form where
    available).
    """
    if method not in (None, "closed", "grid"):
        raise InvalidConfig(f"unknown method {method!r}")
    if sense is None:
        sense = _auto_sense(f, b)
    if sense not in ("max", "min"):
        raise InvalidConfig(f"unknown sense {sense!r}")
    name = "K"
    if b.degenerate:
        f(b.m)
        return ConstantResult(name, 1.0, b.m, Method.CLOSED_FORM, f, b)
    if isinstance(f, Affine):
        if f(b.m) == 0.0 or f(b.M) == 0.0 or (f(b.m) > 0) != (f(b.M) > 0):
            raise SignChange(f"{f.spec} vanishes on [{b.m}, {b.M}]")
        return ConstantResult(name, 1.0, b.m, Method.CLOSED_FORM, f, b)

    ch = chord(f, b)
    closed_ok = isinstance(f, (PowerOneMinus, Exp))
    if method == "closed" and not closed_ok:
        raise InvalidConfig(f"no closed form for {f.spec}")

    ts = b.grid(K_GRID_POINTS if method == "grid" or not closed_ok else BETA_GRID_POINTS)
    fs = np.asarray(f(ts))
    if not (np.all(fs > 0) or np.all(fs < 0)):
        raise SignChange(f"{f.spec} vanishes or changes sign on [{b.m}, {b.M}]")

    if closed_ok and method != "grid":
        candidates = [b.m, b.M]
        try:
            pts = _exp_points(b) if isinstance(f, Exp) else _power_points(f.r, b)
            candidates.append(pts.t1)
        except DegenerateChord:
            pass  # r in {0, 1}: f is constant or affine, endpoints suffice
        ratios = [ch(t) / f(t) for t in candidates]
        pick = max if sense == "max" else min
        value = pick(ratios)
        return ConstantResult(name, float(value), float(candidates[ratios.index(value)]),
                              Method.CLOSED_FORM, f, b)

    value, at = _grid_extremum(ch(ts) / fs, ts, sense)
    return ConstantResult(name, value, at, Method.GRID_ORACLE, f, b)


@functools.lru_cache(maxsize=512)
def _gap_scan(f: ScalarFunction, b: IntervalBounds, points: int):
    ts = b.grid(points)
    ch = chord(f, b)
    gap = np.asarray(f(ts), dtype=float) - ch(ts)
    # the chord interpolates f at both endpoints; drop the rounding residue there
    gap[0] = gap[-1] = 0.0
    ts.flags.writeable = gap.flags.writeable = False  # shared through the cache
    return ts, gap


def beta_tilde(f: ScalarFunction, b: IntervalBounds, points: int = BETA_GRID_POINTS) -> ConstantResult:
    """``max_t f(t) - chord(t)`` over ``[m, M]`` (grid with endpoints)."""
    if b.degenerate or isinstance(f, Affine):
        f(b.m)
        return ConstantResult("beta_tilde", 0.0, b.m, Method.CLOSED_FORM, f, b)
    ts, gap = _gap_scan(f, b, points)
    value, at = _grid_extremum(gap, ts, "max")
    return ConstantResult("beta_tilde", value, at, Method.GRID_ORACLE, f, b)


def beta(f: ScalarFunction, b: IntervalBounds, points: int = BETA_GRID_POINTS) -> ConstantResult:
    """``min_t chord(t) - f(t)`` over ``[m, M]``; always equals ``-beta_tilde``."""
    bt = beta_tilde(f, b, points)
    # same objective negated: min(-x) == -max(x) exactly, same first-index argmax
    return ConstantResult("beta", -bt.value if bt.value else 0.0, bt.argmax_t, bt.method, f, b)


def chord_excess(f: ScalarFunction, b: IntervalBounds, points: int = BETA_GRID_POINTS) -> float:
    """``max_t chord(t) - f(t)``: the additive constant that works for convex ``f``."""
    if b.degenerate or isinstance(f, Affine):
        return 0.0
    _, gap = _gap_scan(f, b, points)
    return float(-np.min(gap))


def relative_difference(x: float, y: float) -> float:
    return abs(x - y) / max(abs(x), abs(y), math.ulp(1.0))
