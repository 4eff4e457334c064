"""One checker per inequality.

A checker evaluates both sides of an inequality on a concrete instance and
returns a :class:`CheckReport`. Hypothesis failures are reported with the
``HypothesisUnmet`` verdict rather than raised, so parameter sweeps can
record them. Multi-link statements (two-sided bounds, chains) carry one
:class:`Link` per comparison; the report's headline ``lhs``/``rhs`` and gap
come from the worst link.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import constants
from .errors import DomainViolation, NotPositiveDefinite, NotPSD, SignChange, UnknownCheck
from .functions import (
    Exp,
    IntervalBounds,
    Power,
    PowerOneMinus,
    ScalarFunction,
    Shape,
    parse_function,
    shape_on,
)
from .maps import Identity, PositiveMap, apply as map_apply, map_from_json
from .matcore import (
    apply_function,
    as_symmetric,
    eigvalsh,
    loewner_compare,
    matrix_from_json,
    matrix_to_json,
    operator_norm,
    spectrum_in,
    Relation,
)
from .means import arith_mean, geom_mean

DEFAULT_TOL = 1e-9
SINGULAR_MARGIN = 1e-6
SPECTRUM_TOL = 1e-9

CHECK_IDS = (
    "bellman-classic",
    "bellman-reversed",
    "geometric-chain",
    "jensen-vector",
    "map-jensen",
    "prop-concave",
    "prop-convex",
    "thm-power",
    "exp-corollary",
    "lemma-mean-defect",
    "lemma-map-defect",
    "additive-theorem",
    "additive-corollary",
    "counterexample",
    "scalar-bellman",
    "scalar-remark-chain",
)

VARIANTS = ("map-first", "power-first", "literal-k")


class Verdict(str, enum.Enum):
    HOLDS = "Holds"
    VIOLATED = "Violated"
    INCOMPARABLE = "Incomparable"
    HYPOTHESIS_UNMET = "HypothesisUnmet"

    @property
    def failed(self) -> bool:
        return self in (Verdict.VIOLATED, Verdict.INCOMPARABLE)


@dataclass(frozen=True)
class Link:
    """One comparison ``lhs <= rhs``; ``tol`` is the scaled tolerance used."""

    name: str
    lhs: object
    rhs: object
    min_eig_gap: float
    tol: float
    verdict: Verdict

    @property
    def relative_gap(self) -> float:
        return self.min_eig_gap / max(self.tol, 1e-300)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "min_eig_gap": self.min_eig_gap,
            "tol": self.tol,
            "verdict": self.verdict.value,
        }


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    verdict: Verdict
    lhs: object
    rhs: object
    min_eig_gap: float
    tol: float
    instance: dict
    links: tuple = ()
    notes: dict = field(default_factory=dict)

    def link(self, name: str) -> Link:
        for ln in self.links:
            if ln.name == name:
                return ln
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "verdict": self.verdict.value,
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "min_eig_gap": self.min_eig_gap,
            "tol": self.tol,
            "instance": self.instance,
            "links": [ln.to_dict() for ln in self.links],
            "notes": {k: _jsonable(v) for k, v in self.notes.items()},
        }


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, enum.Enum):
        return x.value
    return x


# -- comparison plumbing --------------------------------------------------------

def compare(name: str, lhs, rhs, tol: float = DEFAULT_TOL) -> Link:
    """Test ``lhs <= rhs`` (Loewner order for matrices, plain order for scalars)."""
    if np.ndim(lhs) == 0 and np.ndim(rhs) == 0:
        lhs, rhs = float(lhs), float(rhs)
        gap = rhs - lhs
        eff = tol * max(1.0, abs(lhs), abs(rhs))
        verdict = Verdict.HOLDS if gap >= -eff else Verdict.VIOLATED
        return Link(name, lhs, rhs, gap, eff, verdict)
    res = loewner_compare(lhs, rhs, tol)
    verdict = {
        Relation.LESS_EQ: Verdict.HOLDS,
        Relation.EQUAL: Verdict.HOLDS,
        Relation.GREATER_EQ: Verdict.VIOLATED,
        Relation.INCOMPARABLE: Verdict.INCOMPARABLE,
    }[res.relation]
    return Link(name, as_symmetric(lhs), as_symmetric(rhs), res.min_eig_ba, res.tol, verdict)


def _overall(links) -> Verdict:
    verdicts = [ln.verdict for ln in links]
    if all(v is Verdict.HOLDS for v in verdicts):
        return Verdict.HOLDS
    if Verdict.VIOLATED in verdicts:
        return Verdict.VIOLATED
    return Verdict.INCOMPARABLE


def _report(check_id, links, instance, notes=None) -> CheckReport:
    links = tuple(links)
    worst = min(links, key=lambda ln: ln.relative_gap)
    return CheckReport(check_id, _overall(links), worst.lhs, worst.rhs, worst.min_eig_gap,
                       worst.tol, instance, links, dict(notes or {}))


class HypothesisUnmet(Exception):
    """Internal signal; converted to a ``HypothesisUnmet`` verdict."""


def _require(cond: bool, reason: str) -> None:
    if not cond:
        raise HypothesisUnmet(reason)


def _unmet(check_id, instance, tol, reason) -> CheckReport:
    return CheckReport(check_id, Verdict.HYPOTHESIS_UNMET, None, None, math.nan, tol, instance,
                       (), {"unmet": reason})


def _guarded(check_id: str):
    """Turn hypothesis failures and domain errors into ``HypothesisUnmet`` reports."""
    def wrap(fn: Callable[..., CheckReport]):
        def run(*args, **kwargs):
            instance = kwargs.pop("_record")
            tol = kwargs.get("tol", DEFAULT_TOL)
            try:
                return fn(*args, **kwargs)
            except HypothesisUnmet as exc:
                return _unmet(check_id, instance, tol, str(exc))
            except (DomainViolation, SignChange, NotPositiveDefinite, NotPSD) as exc:
                return _unmet(check_id, instance, tol, f"{type(exc).__name__}: {exc}")
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# -- instances ------------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    """Parameters of one matrix check.

    ``variant`` selects how ``Phi(X)^r`` is read: ``"map-first"`` means
    ``(Phi(X))^r``, ``"power-first"`` means ``Phi(X^r)``. ``"literal-k"``
    forces the maximum in the ratio constant even for concave ``f``.
    """

    A: np.ndarray
    B: np.ndarray | None = None
    v: float = 0.5
    r: float | None = None
    f: ScalarFunction | None = None
    phi: PositiveMap | None = None
    bounds: IntervalBounds | None = None
    seed: int | None = None
    variant: str = "map-first"

    def __post_init__(self):
        a = as_symmetric(self.A)
        object.__setattr__(self, "A", a)
        if self.B is not None:
            object.__setattr__(self, "B", as_symmetric(self.B))
        if self.phi is None:
            object.__setattr__(self, "phi", Identity(a.shape[0]))
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def to_record(self) -> dict:
        rec = {"A": matrix_to_json(self.A), "v": self.v, "phi": self.phi.to_json(),
               "variant": self.variant}
        if self.B is not None:
            rec["B"] = matrix_to_json(self.B)
        if self.r is not None:
            rec["r"] = self.r
        if self.f is not None:
            rec["f"] = self.f.spec
        if self.bounds is not None:
            rec["m"], rec["M"] = self.bounds.m, self.bounds.M
        if self.seed is not None:
            rec["seed"] = self.seed
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "Instance":
        return cls(
            A=matrix_from_json(rec["A"]),
            B=matrix_from_json(rec["B"]) if "B" in rec else None,
            v=float(rec.get("v", 0.5)),
            r=float(rec["r"]) if rec.get("r") is not None else None,
            f=parse_function(rec["f"]) if rec.get("f") else None,
            phi=map_from_json(rec["phi"]) if "phi" in rec else None,
            bounds=IntervalBounds(rec["m"], rec["M"]) if "m" in rec else None,
            seed=rec.get("seed"),
            variant=rec.get("variant", "map-first"),
        )


def _in_power_gap(r: float) -> bool:
    return -1.0 <= r <= 0.0 or 1.0 <= r <= 2.0


def _pow(x, r):
    return apply_function(x, Power(r))


def _eye(n):
    return np.eye(n)


def _need_weight(inst: Instance):
    _require(0.0 <= inst.v <= 1.0, f"v={inst.v} outside [0, 1]")


def _need_pair(inst: Instance):
    _require(inst.B is not None, "instance needs B")
    _require(inst.A.shape == inst.B.shape, "A and B differ in dimension")
    _require(inst.phi.n_in == inst.n, f"map expects dimension {inst.phi.n_in}, got {inst.n}")


def _need_bounds(inst: Instance, *mats):
    _require(inst.bounds is not None, "instance needs bounds m, M")
    b = inst.bounds
    for name, x in zip("AB", mats):
        _require(spectrum_in(x, b.m, b.M, SPECTRUM_TOL), f"spectrum of {name} not in [{b.m}, {b.M}]")


def _need_shape(f: ScalarFunction, b: IntervalBounds, allowed: tuple[Shape, ...]) -> Shape:
    shape = shape_on(f, b)
    _require(shape in allowed, f"{f.spec} is {shape.value} on [{b.m}, {b.M}]")
    return shape


def _need_open_unit(b: IntervalBounds):
    _require(0.0 < b.m <= b.M < 1.0, f"need 0 < m <= M < 1, got [{b.m}, {b.M}]")


def _k_sense(inst: Instance):
    return "max" if inst.variant == "literal-k" else None


# -- checks ---------------------------------------------------------------------

def check_bellman_classic(inst: Instance, tol: float = DEFAULT_TOL) -> CheckReport:
    """``Phi((I-A)^r nabla_v (I-B)^r) <= Phi(I - A nabla_v B)^r`` for ``r, v`` in [0, 1]."""
    return _bellman_classic(inst, tol=tol, _record=inst.to_record())


@_guarded("bellman-classic")
def _bellman_classic(inst, tol):
    _need_pair(inst)
    _need_weight(inst)
    r = inst.r
    _require(r is not None and 0.0 <= r <= 1.0, f"r={r} outside [0, 1]")
    for name, x in (("A", inst.A), ("B", inst.B)):
        _require(spectrum_in(x, 0.0, 1.0, SPECTRUM_TOL), f"spectrum of {name} not in [0, 1]")
    I = _eye(inst.n)
    phi = inst.phi
    lhs = map_apply(phi, arith_mean(_pow(I - inst.A, r), _pow(I - inst.B, r), inst.v))
    c = arith_mean(inst.A, inst.B, inst.v)
    if inst.variant == "power-first":
        rhs = map_apply(phi, _pow(I - c, r))
    else:
        rhs = _pow(map_apply(phi, I - c), r)
    return _report("bellman-classic", [compare("main", lhs, rhs, tol)], inst.to_record())


def _strict_one_minus(inst: Instance, c) -> None:
    I = _eye(inst.n)
    for name, x in (("I-A", I - inst.A), ("I-B", I - inst.B), ("I-A nabla_v B", I - c)):
        _require(eigvalsh(x)[0] >= SINGULAR_MARGIN, f"{name} is (nearly) singular")


def check_bellman_reversed(inst: Instance, tol: float = DEFAULT_TOL) -> CheckReport:
    """``Phi(I - A nabla_v B)^r <= Phi((I-A)^r nabla_v (I-B)^r)`` for ``r`` in [-1,0] U [1,2]."""
    return _bellman_reversed(inst, tol=tol, _record=inst.to_record())


@_guarded("bellman-reversed")
def _bellman_reversed(inst, tol):
    _need_pair(inst)
    _need_weight(inst)
    r = inst.r
    _require(r is not None and _in_power_gap(r), f"r={r} outside [-1, 0] U [1, 2]")
    for name, x in (("A", inst.A), ("B", inst.B)):
        _require(spectrum_in(x, 0.0, 1.0, SPECTRUM_TOL), f"spectrum of {name} not in [0, 1]")
    I = _eye(inst.n)
    c = arith_mean(inst.A, inst.B, inst.v)
    if r < 0:
        _strict_one_minus(inst, c)
    phi = inst.phi
    if inst.variant == "power-first":
        lhs = map_apply(phi, _pow(I - c, r))
    else:
        lhs = _pow(map_apply(phi, I - c), r)
    rhs = map_apply(phi, arith_mean(_pow(I - inst.A, r), _pow(I - inst.B, r), inst.v))
    return _report("bellman-reversed", [compare("main", lhs, rhs, tol)], inst.to_record())


def check_geometric_chain(inst: Instance, tol: float = DEFAULT_TOL) -> CheckReport:
    """Three-link chain through weighted geometric means, ``r`` in [-1, 0].

    ``Phi(I-A nabla B)^r <= Phi(I-A)^r #_v Phi(I-B)^r <= Phi((I-A)^r #_v (I-B)^r)
    <= Phi((I-A)^r nabla_v (I-B)^r)``
    """
    return _geometric_chain(inst, tol=tol, _record=inst.to_record())


@_guarded("geometric-chain")
def _geometric_chain(inst, tol):
    _need_pair(inst)
    _need_weight(inst)
    r, v, phi = inst.r, inst.v, inst.phi
    _require(r is not None and -1.0 <= r <= 0.0, f"r={r} outside [-1, 0]")
    for name, x in (("A", inst.A), ("B", inst.B)):
        _require(spectrum_in(x, 0.0, 1.0, SPECTRUM_TOL), f"spectrum of {name} not in [0, 1]")
    I = _eye(inst.n)
    c = arith_mean(inst.A, inst.B, v)
    _strict_one_minus(inst, c)
    x, y = I - inst.A, I - inst.B
    xr, yr = _pow(x, r), _pow(y, r)
    if inst.variant == "power-first":
        t0 = map_apply(phi, _pow(I - c, r))
        t1 = geom_mean(map_apply(phi, xr), map_apply(phi, yr), v)
    else:
        t0 = _pow(map_apply(phi, I - c), r)
        t1 = geom_mean(_pow(map_apply(phi, x), r), _pow(map_apply(phi, y), r), v)
    t2 = map_apply(phi, geom_mean(xr, yr, v))
    t3 = map_apply(phi, arith_mean(xr, yr, v))
    links = [compare("arith-power<=geom-of-map", t0, t1, tol),
             compare("geom-of-map<=map-of-geom", t1, t2, tol),
             compare("map-of-geom<=map-of-arith", t2, t3, tol)]
    return _report("geometric-chain", links, inst.to_record())


def check_jensen_vector(A, f: ScalarFunction, u, tol: float = DEFAULT_TOL) -> CheckReport:
    """``<f(A)u, u> <= f(<Au, u>)`` for concave ``f`` and unit ``u``."""
    A = as_symmetric(A)
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    record = {"A": matrix_to_json(A), "f": f.spec, "u": u.tolist()}
    return _jensen_vector(A, f, u, tol=tol, _record=record)


@_guarded("jensen-vector")
def _jensen_vector(A, f, u, tol):
    _require(u.shape[0] == A.shape[0], "u and A differ in dimension")
    _require(abs(float(np.linalg.norm(u)) - 1.0) <= 1e-12, "u is not a unit vector")
    w = eigvalsh(A)
    _need_shape(f, IntervalBounds(float(w[0]), float(w[-1])), (Shape.CONCAVE, Shape.AFFINE))
    lhs = float(u @ apply_function(A, f) @ u)
    rhs = f.eval(float(u @ A @ u))
    record = {"A": matrix_to_json(A), "f": f.spec, "u": u.tolist()}
    return _report("jensen-vector", [compare("main", lhs, rhs, tol)], record)


def check_map_jensen(inst: Instance, tol: float = DEFAULT_TOL) -> CheckReport:
    """``K Phi(f(A)) <= f(Phi(A)) <= Phi(f(A)) / K`` for concave positive ``f``."""
    return _map_jensen(inst, tol=tol, _record=inst.to_record())


@_guarded("map-jensen")
def _map_jensen(inst, tol):
    f, b, phi = inst.f, inst.bounds, inst.phi
    _require(f is not None, "instance needs f")
    _require(phi.n_in == inst.n, "map dimension mismatch")
    _need_bounds(inst, inst.A)
    _need_shape(f, b, (Shape.CONCAVE, Shape.AFFINE))
    k = constants.kantorovich(f, b, sense=_k_sense(inst))
    fa = map_apply(phi, apply_function(inst.A, f))
    mid = apply_function(map_apply(phi, inst.A), f)
    links = [compare("lower", k.value * fa, mid, tol),
             compare("upper", mid, fa / k.value, tol)]
    return _report("map-jensen", links, inst.to_record(), {"K": k.value, "K_argmax_t": k.argmax_t})


def check_prop_concave(inst: Instance, tol: float = DEFAULT_TOL) -> CheckReport:
    """``Phi(f(A)) nabla_v Phi(f(B)) <= f(Phi(A nabla_v B)) / K^2`` for concave positive ``f``.

    Also reports the intermediate ``f(A) nabla_v f(B) <= f(A nabla_v B) / K``
    as the ``pointwise`` link.
    """
    return _prop_concave(inst, tol=tol, _record=inst.to_record())


@_guarded("prop-concave")
def _prop_concave(inst, tol):
    f, b, phi, v = inst.f, inst.bounds, inst.phi, inst.v
    _require(f is not None, "instance needs f")
    _need_pair(inst)
    _need_weight(inst)
    _need_bounds(inst, inst.A, inst.B)
    _need_shape(f, b, (Shape.CONCAVE, Shape.AFFINE))
    k = constants.kantorovich(f, b, sense=_k_sense(inst)).value
    fa, fb = apply_function(inst.A, f), apply_function(inst.B, f)
    c = arith_mean(inst.A, inst.B, v)
    links = [
        compare("pointwise", arith_mean(fa, fb, v), apply_function(c, f) / k, tol),
        compare("main", arith_mean(map_apply(phi, fa), map_apply(phi, fb), v),
                apply_function(map_apply(phi, c), f) / k**2, tol),
    ]
    return _report("prop-concave", links, inst.to_record(), {"K": k, "K2": k * k})


def check_prop_convex(inst: Instance, tol: float = DEFAULT_TOL) -> CheckReport:
    """``f(Phi(A nabla_v B)) / K^2 <= Phi(f(A)) nabla_v Phi(f(B))`` for convex positive ``f``."""
    return _prop_convex(inst, tol=tol, _record=inst.to_record())


@_guarded("prop-convex")
def _prop_convex(inst, tol):
    f, b, phi, v = inst.f, inst.bounds, inst.phi, inst.v
    _require(f is not None, "instance needs f")
    _need_pair(inst)
    _need_weight(inst)
    _need_bounds(inst, inst.A, inst.B)
    _need_shape(f, b, (Shape.CONVEX, Shape.AFFINE))
    k = constants.kantorovich(f, b, sense="max").value
    c = arith_mean(inst.A, inst.B, v)
    lhs = apply_function(map_apply(phi, c), f) / k**2
    rhs = arith_mean(map_apply(phi, apply_function(inst.A, f)),
                     map_apply(phi, apply_function(inst.B, f)), v)
    # stated without proof; a failure here is a claim failure, not a numeric one
    notes = {"K": k, "K2": k * k, "claim_status": "stated-without-proof"}
    return _report("prop-convex", [compare("main", lhs, rhs, tol)], inst.to_record(), notes)


def _power_pair(inst: Instance, f: ScalarFunction):
    """``(I - Phi(C))^r`` (or ``Phi((I - C)^r)``) and ``Phi(f(A) nabla_v f(B))``."""
    phi, v = inst.phi, inst.v
    c = arith_mean(inst.A, inst.B, v)
    if inst.variant == "power-first":
        lhs = map_apply(phi, apply_function(c, f))
    else:
        lhs = apply_function(map_apply(phi, c), f)
    mean = map_apply(phi, arith_mean(apply_function(inst.A, f), apply_function(inst.B, f), v))
    return lhs, mean


def check_thm_power(inst: Instance, tol: float = DEFAULT_TOL) -> CheckReport:
    """``(I - Phi(A nabla_v B))^r <= K(m, M, (1-t)^r)^2 Phi((I-A)^r nabla_v (I-B)^r)``."""
    return _thm_power(inst, tol=tol, _record=inst.to_record())


@_guarded("thm-power")
def _thm_power(inst, tol):
    r, b = inst.r, inst.bounds
    _require(r is not None and not _in_power_gap(r), f"r={r} lies in [-1, 0] U [1, 2]")
    _need_pair(inst)
    _need_weight(inst)
    _need_bounds(inst, inst.A, inst.B)
    _need_open_unit(b)
    f = PowerOneMinus(r)
    kc = constants.kantorovich(f, b, sense="max")
    kg = constants.kantorovich(f, b, method="grid", sense="max")
    lhs, mean = _power_pair(inst, f)
    rhs = kc.value**2 * mean
    notes = {
        "K": kc.value, "K2": kc.value**2, "K_method": kc.method.value,
        "K_grid": kg.value, "K_rel_diff": constants.relative_difference(kc.value, kg.value),
        "argmax_closed": kc.argmax_t, "argmax_grid": kg.argmax_t,
    }
    return _report("thm-power", [compare("main", lhs, rhs, tol)], inst.to_record(), notes)


def check_exp_corollary(inst: Instance, tol: float = DEFAULT_TOL) -> CheckReport:
    """``exp(Phi(A nabla_v B)) <= K(m, M, exp)^2 Phi(exp(A) nabla_v exp(B))``."""
    return _exp_corollary(inst, tol=tol, _record=inst.to_record())


@_guarded("exp-corollary")
def _exp_corollary(inst, tol):
    b = inst.bounds
    _need_pair(inst)
    _need_weight(inst)
    _need_bounds(inst, inst.A, inst.B)
    f = Exp()
    k = constants.kantorovich(f, b, sense="max")
    lhs, mean = _power_pair(replace(inst, variant="map-first"), f)
    notes = {"K": k.value, "K2": k.value**2, "K_method": k.method.value, "argmax": k.argmax_t}
    return _report("exp-corollary", [compare("main", lhs, k.value**2 * mean, tol)],
                   inst.to_record(), notes)


def check_lemma_mean_defect(A, B, v, f: ScalarFunction, bounds: IntervalBounds,
                            tol: float = DEFAULT_TOL) -> CheckReport:
    """``beta I <= f(A) nabla_v f(B) - f(A nabla_v B) <= -beta I`` for concave ``f``."""
    inst = Instance(A=A, B=B, v=v, f=f, bounds=bounds)
    return _lemma_mean_defect(inst, tol=tol, _record=inst.to_record())


@_guarded("lemma-mean-defect")
def _lemma_mean_defect(inst, tol):
    f, b, v = inst.f, inst.bounds, inst.v
    _require(f is not None, "instance needs f")
    _need_pair(inst)
    _need_weight(inst)
    _need_bounds(inst, inst.A, inst.B)
    _require(b.m > 0, f"need m > 0, got {b.m}")
    _need_shape(f, b, (Shape.CONCAVE, Shape.AFFINE))
    beta = constants.beta(f, b).value
    defect = arith_mean(apply_function(inst.A, f), apply_function(inst.B, f), v) \
        - apply_function(arith_mean(inst.A, inst.B, v), f)
    I = _eye(inst.n)
    links = [compare("lower", beta * I, defect, tol), compare("upper", defect, -beta * I, tol)]
    return _report("lemma-mean-defect", links, inst.to_record(), {"beta": beta})


def check_lemma_map_defect(A, f: ScalarFunction, phi: PositiveMap, bounds: IntervalBounds,
                           tol: float = DEFAULT_TOL) -> CheckReport:
    """``-beta~ I <= f(Phi(A)) - Phi(f(A)) <= beta~ I`` for concave ``f``."""
    inst = Instance(A=A, f=f, phi=phi, bounds=bounds)
    return _lemma_map_defect(inst, tol=tol, _record=inst.to_record())


@_guarded("lemma-map-defect")
def _lemma_map_defect(inst, tol):
    f, b, phi = inst.f, inst.bounds, inst.phi
    _require(f is not None, "instance needs f")
    _require(phi.n_in == inst.n, "map dimension mismatch")
    _need_bounds(inst, inst.A)
    _need_shape(f, b, (Shape.CONCAVE, Shape.AFFINE))
    bt = constants.beta_tilde(f, b).value
    defect = apply_function(map_apply(phi, inst.A), f) - map_apply(phi, apply_function(inst.A, f))
    I = _eye(phi.n_out)
    links = [compare("lower", -bt * I, defect, tol), compare("upper", defect, bt * I, tol)]
    return _report("lemma-map-defect", links, inst.to_record(), {"beta_tilde": bt})


def _additive_notes(f, b) -> dict:
    bt = constants.beta_tilde(f, b).value
    be = constants.beta(f, b).value
    return {
        "beta": be,
        "beta_tilde": bt,
        "statement_bound": 2.0 * bt,
        "proof_bound": bt - be,
        "bounds_agree": abs(2.0 * bt - (bt - be)) <= 1e-12,
    }


def check_additive_theorem(inst: Instance, tol: float = DEFAULT_TOL) -> CheckReport:
    """``f(Phi(A nabla_v B)) <= Phi(f(A)) nabla_v Phi(f(B)) + 2 beta~ I`` for concave ``f``."""
    return _additive_theorem(inst, tol=tol, _record=inst.to_record())


@_guarded("additive-theorem")
def _additive_theorem(inst, tol):
    f, b = inst.f, inst.bounds
    _require(f is not None, "instance needs f")
    _need_pair(inst)
    _need_weight(inst)
    _need_bounds(inst, inst.A, inst.B)
    _need_shape(f, b, (Shape.CONCAVE, Shape.AFFINE))
    notes = _additive_notes(f, b)
    lhs, mean = _power_pair(replace(inst, variant="map-first"), f)
    rhs = mean + notes["statement_bound"] * _eye(inst.phi.n_out)
    return _report("additive-theorem", [compare("main", lhs, rhs, tol)], inst.to_record(), notes)


def check_additive_corollary(inst: Instance, tol: float = DEFAULT_TOL) -> CheckReport:
    """``(I - Phi(A nabla_v B))^r <= Phi((I-A)^r nabla_v (I-B)^r) + 2 beta~(m, M, (1-t)^r) I``.

    The verdict tests the statement as written. ``(1 - t)^r`` is convex
    for every admissible ``r``, where ``beta~`` vanishes; the notes also
    carry the gap obtained with the chord excess ``max(chord - f)``, which
    is the additive constant that provably works for convex ``f``.
    """
    return _additive_corollary(inst, tol=tol, _record=inst.to_record())


@_guarded("additive-corollary")
def _additive_corollary(inst, tol):
    r, b = inst.r, inst.bounds
    _require(r is not None and not _in_power_gap(r), f"r={r} lies in [-1, 0] U [1, 2]")
    _need_pair(inst)
    _need_weight(inst)
    _need_bounds(inst, inst.A, inst.B)
    _need_open_unit(b)
    f = PowerOneMinus(r)
    notes = _additive_notes(f, b)
    lhs, mean = _power_pair(inst, f)
    I = _eye(inst.phi.n_out)
    rhs = mean + notes["statement_bound"] * I
    excess = constants.chord_excess(f, b)
    repaired = compare("chord-excess", lhs, mean + excess * I, tol)
    notes.update({
        "shape": shape_on(f, b).value,
        "chord_excess": excess,
        "chord_excess_gap": repaired.min_eig_gap,
        "chord_excess_verdict": repaired.verdict.value,
    })
    return _report("additive-corollary", [compare("main", lhs, rhs, tol)], inst.to_record(), notes)


COUNTEREXAMPLE_A = ((2.0, 1.0), (1.0, 1.0))
COUNTEREXAMPLE_B = ((1.0, 0.0), (0.0, 0.0))
COUNTEREXAMPLE_LHS = ((-0.25, -0.25), (-0.25, 0.25))
COUNTEREXAMPLE_RHS = ((-1.5, -1.0), (-1.0, 0.0))


def reproduce_counterexample(tol: float = DEFAULT_TOL) -> CheckReport:
    """The fixed 2x2 instance with ``Phi = id``, ``v = 1/2``, ``r = 3``.

    Tests ``Phi(I - A nabla_v B)^r <= Phi((I-A)^r nabla_v (I-B)^r)``, which
    fails: the two sides are incomparable. ``A`` is not a contraction; that
    is flagged in the notes, not treated as an unmet hypothesis.
    """
    inst = Instance(A=COUNTEREXAMPLE_A, B=COUNTEREXAMPLE_B, v=0.5, r=3.0, phi=Identity(2))
    I = _eye(2)
    c = arith_mean(inst.A, inst.B, inst.v)
    lhs = _pow(map_apply(inst.phi, I - c), 3.0)
    rhs = map_apply(inst.phi, arith_mean(_pow(I - inst.A, 3.0), _pow(I - inst.B, 3.0), inst.v))
    link = compare("main", lhs, rhs, tol)
    notes = {
        "expected_lhs": COUNTEREXAMPLE_LHS,
        "expected_rhs": COUNTEREXAMPLE_RHS,
        "lhs_max_abs_error": float(np.max(np.abs(lhs - np.array(COUNTEREXAMPLE_LHS)))),
        "rhs_max_abs_error": float(np.max(np.abs(rhs - np.array(COUNTEREXAMPLE_RHS)))),
        "A_norm": operator_norm(inst.A),
        "A_is_contraction": operator_norm(inst.A) <= 1.0,
        "min_eig_lhs_minus_rhs": -loewner_compare(lhs, rhs, tol).min_eig_ab,
    }
    return _report("counterexample", [link], inst.to_record(), notes)


def check_scalar_bellman(a, b, A_cap: float, B_cap: float, r: int,
                         tol: float = DEFAULT_TOL) -> CheckReport:
    """``(A^r - sum a^r)^(1/r) + (B^r - sum b^r)^(1/r) <= ((A+B)^r - sum (a+b)^r)^(1/r)``."""
    record = {"a": [float(x) for x in a], "b": [float(x) for x in b],
              "A_cap": float(A_cap), "B_cap": float(B_cap), "r": r}
    return _scalar_bellman(record, tol=tol, _record=record)


@_guarded("scalar-bellman")
def _scalar_bellman(rec, tol):
    a, b = np.asarray(rec["a"], float), np.asarray(rec["b"], float)
    A, B, r = rec["A_cap"], rec["B_cap"], rec["r"]
    _require(float(r).is_integer() and r >= 1, f"r={r} is not a positive integer")
    r = int(r)
    _require(len(a) == len(b) and len(a) >= 1, "a and b must be non-empty and equal length")
    _require(bool(np.all(a > 0) and np.all(b > 0) and A > 0 and B > 0), "values must be positive")
    da = A**r - float(np.sum(a**r))
    db = B**r - float(np.sum(b**r))
    slack = 1e-12
    _require(da >= -slack * A**r, "sum a_i^r exceeds A^r")
    _require(db >= -slack * B**r, "sum b_i^r exceeds B^r")
    dab = (A + B) ** r - float(np.sum((a + b) ** r))
    lhs = max(da, 0.0) ** (1.0 / r) + max(db, 0.0) ** (1.0 / r)
    rhs = max(dab, 0.0) ** (1.0 / r)
    return _report("scalar-bellman", [compare("main", lhs, rhs, tol)], rec)


def check_scalar_remark_chain(a, b, M1: float, M2: float, r: float,
                              bounds: IntervalBounds | None = None,
                              tol: float = DEFAULT_TOL) -> CheckReport:
    """Scalar Bellman-type chain for ``r > 2`` with ``v = M2 / (M1 + M2)``.

    With ``a' = a / M1`` and ``b' = b / M2`` and ``S(x) = sum x_k^(1/r)``:

    * ``concavity``: ``(1 - S(a' nabla_v b'))^r <= ((1 - S(a')) nabla_v (1 - S(b')))^r``
    * ``kantorovich``: the latter ``<= xi ((1 - S(a'))^r nabla_v (1 - S(b'))^r)``
      with ``xi = K(m, M, (1-t)^r)^2``
    * ``final``: the same bound rewritten in the unscaled ``a, b, M1, M2``.

    ``bounds`` defaults to the tightest ``[m, M]`` containing ``S(a')`` and ``S(b')``.
    """
    record = {"a": [float(x) for x in a], "b": [float(x) for x in b],
              "M1": float(M1), "M2": float(M2), "r": float(r)}
    if bounds is not None:
        record["m"], record["M"] = bounds.m, bounds.M
    return _scalar_remark_chain(record, tol=tol, _record=record)


@_guarded("scalar-remark-chain")
def _scalar_remark_chain(rec, tol):
    a, b = np.asarray(rec["a"], float), np.asarray(rec["b"], float)
    M1, M2, r = rec["M1"], rec["M2"], rec["r"]
    _require(r > 2, f"r={r} must exceed 2")
    _require(len(a) == len(b) and len(a) >= 1, "a and b must be non-empty and equal length")
    _require(bool(np.all(a > 0) and np.all(b > 0) and M1 > 0 and M2 > 0), "values must be positive")
    p = 1.0 / r
    sa = float(np.sum((a / M1) ** p))
    sb = float(np.sum((b / M2) ** p))
    if "m" in rec:
        bnd = IntervalBounds(rec["m"], rec["M"])
    else:
        bnd = IntervalBounds(min(sa, sb), max(sa, sb))
    _require(0 < bnd.m and bnd.M < 1, f"need 0 < m <= M < 1, got [{bnd.m}, {bnd.M}]")
    _require(bnd.m - 1e-12 <= sa <= bnd.M + 1e-12 and bnd.m - 1e-12 <= sb <= bnd.M + 1e-12,
             "scaled sums outside [m, M]")
    v = M2 / (M1 + M2)
    s_mix = float(np.sum(((1 - v) * a / M1 + v * b / M2) ** p))
    _require(s_mix < 1.0, f"sum of mixed roots {s_mix:.6g} >= 1: (1 - s)^r undefined")
    xi = constants.kantorovich(PowerOneMinus(r), bnd, sense="max").value ** 2
    t0 = (1.0 - s_mix) ** r
    t1 = ((1 - v) * (1.0 - sa) + v * (1.0 - sb)) ** r
    t2 = xi * ((1 - v) * (1.0 - sa) ** r + v * (1.0 - sb) ** r)
    total = M1 + M2
    final_lhs = ((total**p - float(np.sum((a + b) ** p))) ** r) / total
    final_rhs = xi * ((M1**p - float(np.sum(a**p))) ** r / total
                      + (M2**p - float(np.sum(b**p))) ** r / total)
    links = [compare("concavity", t0, t1, tol), compare("kantorovich", t1, t2, tol),
             compare("final", final_lhs, final_rhs, tol)]
    notes = {"xi": xi, "v": v, "S_a": sa, "S_b": sb, "m": bnd.m, "M": bnd.M,
             "final_lhs_consistency": abs(final_lhs - t0) / max(1.0, abs(t0)),
             "final_rhs_consistency": abs(final_rhs - t2) / max(1.0, abs(t2))}
    return _report("scalar-remark-chain", links, rec, notes)


# -- registry -------------------------------------------------------------------

def _bounds_of(rec):
    return IntervalBounds(rec["m"], rec["M"])


def run_record(check_id: str, rec: dict, tol: float = DEFAULT_TOL) -> CheckReport:
    """Run ``check_id`` on a JSON instance record (as stored in reports)."""
    if check_id == "counterexample":
        return reproduce_counterexample(tol)
    if check_id == "scalar-bellman":
        return check_scalar_bellman(rec["a"], rec["b"], rec["A_cap"], rec["B_cap"], rec["r"], tol)
    if check_id == "scalar-remark-chain":
        bnd = _bounds_of(rec) if "m" in rec else None
        return check_scalar_remark_chain(rec["a"], rec["b"], rec["M1"], rec["M2"], rec["r"], bnd, tol)
    if check_id == "jensen-vector":
        return check_jensen_vector(matrix_from_json(rec["A"]), parse_function(rec["f"]),
                                   np.asarray(rec["u"], float), tol)
    inst = Instance.from_record(rec)
    if check_id == "lemma-mean-defect":
        return check_lemma_mean_defect(inst.A, inst.B, inst.v, inst.f, inst.bounds, tol)
    if check_id == "lemma-map-defect":
        return check_lemma_map_defect(inst.A, inst.f, inst.phi, inst.bounds, tol)
    runners = {
        "bellman-classic": check_bellman_classic,
        "bellman-reversed": check_bellman_reversed,
        "geometric-chain": check_geometric_chain,
        "map-jensen": check_map_jensen,
        "prop-concave": check_prop_concave,
        "prop-convex": check_prop_convex,
        "thm-power": check_thm_power,
        "exp-corollary": check_exp_corollary,
        "additive-theorem": check_additive_theorem,
        "additive-corollary": check_additive_corollary,
    }
    if check_id not in runners:
        raise UnknownCheck(check_id)
    return runners[check_id](inst, tol)


__all__ = [
    "CHECK_IDS",
    "CheckReport",
    "Instance",
    "Link",
    "Verdict",
    "check_additive_corollary",
    "check_additive_theorem",
    "check_bellman_classic",
    "check_bellman_reversed",
    "check_exp_corollary",
    "check_geometric_chain",
    "check_jensen_vector",
    "check_lemma_map_defect",
    "check_lemma_mean_defect",
    "check_map_jensen",
    "check_prop_concave",
    "check_prop_convex",
    "check_scalar_bellman",
    "check_scalar_remark_chain",
    "check_thm_power",
    "compare",
    "reproduce_counterexample",
    "run_record",
]
