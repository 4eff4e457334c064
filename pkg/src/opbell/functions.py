"""Closed catalog of scalar functions with domain metadata and a numeric
concavity/convexity probe.

Members are frozen dataclasses, so they hash and can key caches. Calling a
member evaluates it elementwise and raises :class:`DomainViolation` for
arguments outside its domain.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation

AFFINE_TOL = 1e-10


@dataclass(frozen=True)
class Interval:
    """Real interval; infinite endpoints are always open."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = False
    hi_closed: bool = False

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"

    def contains(self, t: float, margin: float = 0.0) -> bool:
        try:
            self.admit(np.asarray([t], dtype=np.float64), margin)
        except DomainViolation:
            return False
        return True

    def admit(self, values, margin: float = 0.0, what: str = "argument") -> np.ndarray:
        """Return ``values`` clipped onto closed endpoints within ``margin``.

        Open endpoints are strict: a value must sit at least ``margin``
        inside. Anything else raises :class:`DomainViolation`.
        """
        x = np.array(values, dtype=np.float64)
        if math.isfinite(self.lo):
            if self.lo_closed:
                bad = x < self.lo - margin
            else:
                bad = x <= self.lo + margin
            if np.any(bad):
                raise DomainViolation(f"{what} {x[bad][0]!r} outside domain {self}")
            if self.lo_closed:
                x = np.maximum(x, self.lo)
        if math.isfinite(self.hi):
            if self.hi_closed:
                bad = x > self.hi + margin
            else:
                bad = x >= self.hi - margin
            if np.any(bad):
                raise DomainViolation(f"{what} {x[bad][0]!r} outside domain {self}")
            if self.hi_closed:
                x = np.minimum(x, self.hi)
        if np.any(np.isnan(x)):
            raise DomainViolation(f"{what} is NaN")
        return x


REALS = Interval()


@dataclass(frozen=True)
class IntervalBounds:
    """Spectral bounds ``m <= A <= M``."""

    m: float
    M: float

    def __post_init__(self):
        if not (math.isfinite(self.m) and math.isfinite(self.M)):
            raise ValueError("bounds must be finite")
        if self.m > self.M:
            raise ValueError(f"m={self.m} exceeds M={self.M}")

    @property
    def degenerate(self) -> bool:
        return self.m == self.M

    def grid(self, points: int) -> np.ndarray:
        """Uniform grid with both endpoints included."""
        return np.linspace(self.m, self.M, points)


class ScalarFunction:
    """Base class of the catalog. Subclasses define ``domain`` and ``_raw``."""

    domain: Interval = REALS

    def _raw(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t):
        x = self.domain.admit(t, 0.0, what=f"argument of {self.spec}")
        out = self._raw(x)
        return out if np.ndim(t) else float(out)

    def eval(self, t: float) -> float:
        return float(self(float(t)))

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.spec


def _is_int(x: float) -> bool:
    return float(x).is_integer()


@dataclass(frozen=True)
class PowerOneMinus(ScalarFunction):
    """``f(t) = (1 - t)**r``."""

    r: float

    @property
    def domain(self) -> Interval:
        if _is_int(self.r) and self.r >= 0:
            return REALS
        return Interval(hi=1.0, hi_closed=False)

    def _raw(self, t):
        if _is_int(self.r) and self.r >= 0:
            return np.power(1.0 - t, int(self.r))
        return np.power(1.0 - t, self.r)

    @property
    def spec(self) -> str:
        return f"power-one-minus:r={self.r!r}"


@dataclass(frozen=True)
class Power(ScalarFunction):
    """``f(t) = t**p``."""

    p: float

    @property
    def domain(self) -> Interval:
        if _is_int(self.p) and self.p >= 0:
            return REALS
        if self.p > 0:
            return Interval(lo=0.0, lo_closed=True)
        return Interval(lo=0.0, lo_closed=False)

    def _raw(self, t):
        if _is_int(self.p) and self.p >= 0:
            return np.power(t, int(self.p))
        return np.power(t, self.p)

    @property
    def spec(self) -> str:
        return f"power:p={self.p!r}"


@dataclass(frozen=True)
class Exp(ScalarFunction):
    def _raw(self, t):
        return np.exp(t)

    @property
    def spec(self) -> str:
        return "exp"


@dataclass(frozen=True)
class Affine(ScalarFunction):
    """``f(t) = a*t + b``."""

    a: float
    b: float

    def _raw(self, t):
        return self.a * t + self.b

    @property
    def spec(self) -> str:
        return f"affine:a={self.a!r},b={self.b!r}"


@dataclass(frozen=True)
class Tabulated(ScalarFunction):
    """Piecewise-linear interpolant through ``(xs[i], ys[i])``."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(float(x) for x in self.xs))
        object.__setattr__(self, "ys", tuple(float(y) for y in self.ys))
        if len(self.xs) != len(self.ys) or len(self.xs) < 2:
            raise ValueError("Tabulated needs at least two (x, y) pairs of equal length")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise ValueError("Tabulated abscissae must be strictly increasing")

    @property
    def domain(self) -> Interval:
        return Interval(self.xs[0], self.xs[-1], True, True)

    def _raw(self, t):
        return np.interp(t, self.xs, self.ys)

    @property
    def spec(self) -> str:
        pts = ";".join(f"{x!r}/{y!r}" for x, y in zip(self.xs, self.ys))
        return f"tabulated:{pts}"


class Shape(str, enum.Enum):
    CONCAVE = "Concave"
    CONVEX = "Convex"
    AFFINE = "Affine"
    NEITHER = "Neither"


def shape_on(f: ScalarFunction, bounds: IntervalBounds, samples: int = 257) -> Shape:
    """Classify ``f`` on ``[m, M]`` by the signs of uniform second differences."""
    if samples < 3:
        raise ValueError("samples must be at least 3")
    if bounds.degenerate:
        f(bounds.m)
        return Shape.AFFINE
    t = bounds.grid(samples)
    y = np.asarray(f(t))
    d2 = y[:-2] - 2.0 * y[1:-1] + y[2:]
    tol = AFFINE_TOL * max(1.0, float(np.max(np.abs(y))))
    pos = bool(np.any(d2 > tol))
    neg = bool(np.any(d2 < -tol))
    if pos and neg:
        return Shape.NEITHER
    if pos:
        return Shape.CONVEX
    if neg:
        return Shape.CONCAVE
    return Shape.AFFINE


def _kv(body: str) -> dict:
    out = {}
    for part in filter(None, body.split(",")):
        key, sep, val = part.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {part!r}")
        out[key.strip()] = float(val)
    return out


def parse_function(spec: str) -> ScalarFunction:
    """Parse a CLI function string such as ``"power-one-minus:r=3"`` or ``"exp"``."""
    name, _, body = spec.strip().partition(":")
    try:
        if name == "exp":
            return Exp()
        if name == "power-one-minus":
            return PowerOneMinus(_kv(body)["r"])
        if name == "power":
            return Power(_kv(body)["p"])
        if name == "affine":
            kv = _kv(body)
            return Affine(kv.get("a", 1.0), kv.get("b", 0.0))
        if name == "tabulated":
            pairs = [p.split("/") for p in body.split(";") if p]
            return Tabulated([float(x) for x, _ in pairs], [float(y) for _, y in pairs])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad function spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown function {name!r} in {spec!r}")
