"""Closed catalog of normalized (unital) positive linear maps.

Every member is completely positive and unital by construction. Maps
serialize to JSON with their concrete parameters (unit vector, isometry
columns, blocks, weights) so a random draw can be replayed exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidConfig
from .matcore import MAX_DIM, as_symmetric

NORMALIZATION_TOL = 1e-10
MAP_KINDS = ("identity", "trace", "pinching", "vector-state", "isometry", "mixture")


class PositiveMap:
    n_in: int
    n_out: int
    kind: str

    def _apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> np.ndarray:
        return apply(self, x)

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Identity(PositiveMap):
    n: int
    kind = "identity"

    @property
    def n_in(self):
        return self.n

    n_out = n_in

    def _apply(self, x):
        return x

    def to_json(self):
        return {"kind": self.kind, "n": self.n}


@dataclass(frozen=True, eq=False)
class TraceNormalized(PositiveMap):
    """``X -> (tr X / n) I``."""

    n: int
    kind = "trace"

    @property
    def n_in(self):
        return self.n

    n_out = n_in

    def _apply(self, x):
        return (np.trace(x) / self.n) * np.eye(self.n)

    def to_json(self):
        return {"kind": self.kind, "n": self.n}


@dataclass(frozen=True, eq=False)
class VectorState(PositiveMap):
    """``X -> [<X u, u>]`` as a 1x1 matrix."""

    u: np.ndarray
    kind = "vector-state"
    n_out = 1

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64).reshape(-1)
        u.flags.writeable = False
        object.__setattr__(self, "u", u)

    @property
    def n_in(self):
        return self.u.shape[0]

    @property
    def unit(self) -> bool:
        return abs(float(np.linalg.norm(self.u)) - 1.0) <= 1e-12

    def _apply(self, x):
        return np.array([[self.u @ x @ self.u]])

    def to_json(self):
        return {"kind": self.kind, "u": self.u.tolist()}


@dataclass(frozen=True, eq=False)
class IsometryCompression(PositiveMap):
    """``X -> V^T X V`` for ``V`` with ``k`` orthonormal columns."""

    V: np.ndarray
    kind = "isometry"

    def __post_init__(self):
        v = np.array(self.V, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] > v.shape[0]:
            raise DimensionMismatch(f"V must be n x k with k <= n, got {v.shape}")
        v.flags.writeable = False
        object.__setattr__(self, "V", v)

    @property
    def n_in(self):
        return self.V.shape[0]

    @property
    def n_out(self):
        return self.V.shape[1]

    def _apply(self, x):
        return self.V.T @ x @ self.V

    def to_json(self):
        return {"kind": self.kind, "V": self.V.tolist()}


@dataclass(frozen=True, eq=False)
class Pinching(PositiveMap):
    """Keep the diagonal blocks of a partition of ``{0..n-1}``, zero the rest."""

    blocks: tuple
    kind = "pinching"

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(i) for i in blk)) for blk in self.blocks)
        flat = sorted(i for blk in blocks for i in blk)
        if not blocks or any(not blk for blk in blocks) or flat != list(range(len(flat))):
            raise InvalidConfig(f"blocks {self.blocks!r} do not partition 0..n-1")
        object.__setattr__(self, "blocks", blocks)
        mask = np.zeros((len(flat), len(flat)), dtype=bool)
        for blk in blocks:
            mask[np.ix_(blk, blk)] = True
        mask.flags.writeable = False
        object.__setattr__(self, "_mask", mask)

    @property
    def n_in(self):
        return self._mask.shape[0]

    n_out = n_in

    def _apply(self, x):
        return np.where(self._mask, x, 0.0)

    def to_json(self):
        return {"kind": self.kind, "blocks": [list(b) for b in self.blocks]}


@dataclass(frozen=True, eq=False)
class Mixture(PositiveMap):
    """Convex combination ``sum w_i phi_i`` of maps with equal in/out dimensions."""

    weights: tuple
    maps: tuple
    kind = "mixture"

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        maps = tuple(self.maps)
        if len(w) != len(maps) or not maps:
            raise InvalidConfig("mixture needs one weight per map")
        if any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-12:
            raise InvalidConfig(f"mixture weights {w} must be non-negative and sum to 1")
        if len({(p.n_in, p.n_out) for p in maps}) != 1:
            raise DimensionMismatch("mixture components differ in dimensions")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "maps", maps)

    @property
    def n_in(self):
        return self.maps[0].n_in

    @property
    def n_out(self):
        return self.maps[0].n_out

    def _apply(self, x):
        return sum(w * p._apply(x) for w, p in zip(self.weights, self.maps))

    def to_json(self):
        return {"kind": self.kind, "weights": list(self.weights),
                "maps": [p.to_json() for p in self.maps]}


def apply(phi: PositiveMap, x) -> np.ndarray:
    x = as_symmetric(x)
    if x.shape[0] != phi.n_in:
        raise DimensionMismatch(f"{phi.kind} expects {phi.n_in}x{phi.n_in}, got {x.shape}")
    return as_symmetric(phi._apply(x))


def verify_normalized(phi: PositiveMap) -> bool:
    try:
        out = apply(phi, np.eye(phi.n_in))
    except (DimensionMismatch, ValueError):
        return False
    return bool(np.max(np.abs(out - np.eye(phi.n_out))) <= NORMALIZATION_TOL)


def map_from_json(obj: dict) -> PositiveMap:
    kind = obj["kind"]
    if kind == "identity":
        return Identity(int(obj["n"]))
    if kind == "trace":
        return TraceNormalized(int(obj["n"]))
    if kind == "vector-state":
        return VectorState(np.asarray(obj["u"]))
    if kind == "isometry":
        return IsometryCompression(np.asarray(obj["V"]))
    if kind == "pinching":
        return Pinching(tuple(tuple(b) for b in obj["blocks"]))
    if kind == "mixture":
        return Mixture(tuple(obj["weights"]), tuple(map_from_json(m) for m in obj["maps"]))
    raise InvalidConfig(f"unknown map kind {kind!r}")


# -- random construction --------------------------------------------------------

def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def haar_orthogonal(n: int, k: int | None, seed) -> np.ndarray:
    """First ``k`` columns of a Haar orthogonal matrix (QR of a Gaussian, sign-fixed)."""
    rng = _rng(seed)
    k = n if k is None else k
    z = rng.standard_normal((n, k))
    q, r = np.linalg.qr(z)
    return q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))


def random_map(kind: str, n: int, seed, k: int | None = None) -> PositiveMap:
    """Draw a valid map of the requested ``kind`` from ``seed`` (int or Generator)."""
    if not 1 <= n <= MAX_DIM:
        raise InvalidConfig(f"dimension {n} outside 1..{MAX_DIM}")
    rng = _rng(seed)
    if kind == "identity":
        return Identity(n)
    if kind == "trace":
        return TraceNormalized(n)
    if kind == "vector-state":
        return VectorState(haar_orthogonal(n, 1, rng)[:, 0])
    if kind == "isometry":
        if k is None:
            k = int(rng.integers(1, n + 1))
        if not 1 <= k <= n:
            raise InvalidConfig(f"isometry needs 1 <= k <= n, got k={k}")
        return IsometryCompression(haar_orthogonal(n, k, rng))
    if kind == "pinching":
        perm = rng.permutation(n)
        cuts = sorted(int(c) for c in np.flatnonzero(rng.random(n - 1) < 0.5) + 1)
        return Pinching(tuple(tuple(int(i) for i in part) for part in np.split(perm, cuts)))
    if kind == "mixture":
        parts = [random_map(kd, n, rng) for kd in ("identity", "trace", "pinching")]
        w = rng.dirichlet(np.ones(len(parts)))
        w[-1] = 1.0 - float(np.sum(w[:-1]))
        return Mixture(tuple(w), tuple(parts))
    raise InvalidConfig(f"unknown map kind {kind!r}; expected one of {MAP_KINDS}")


def _spec_kv(body: str) -> dict:
    out = {}
    for part in filter(None, body.split(",")):
        key, _, val = part.partition("=")
        out[key.strip()] = val.strip()
    return out


def parse_map(spec: str, n: int) -> PositiveMap:
    """Parse a CLI map string (``"identity"``, ``"isometry:k=2,seed=1"``, ...)."""
    spec = spec.strip()
    if spec.startswith("mix:"):
        weights, maps = [], []
        for term in spec[4:].split("+"):
            w, _, sub = term.partition("*")
            weights.append(float(w))
            maps.append(parse_map(sub, n))
        return Mixture(tuple(weights), tuple(maps))
    name, _, body = spec.partition(":")
    if name == "pinching":
        # "blocks=1|2,3": 1-based indices, '|' separates blocks
        raw = body.partition("=")[2]
        blocks = [[int(i) - 1 for i in blk.split(",") if i] for blk in raw.split("|")]
        return Pinching(tuple(tuple(b) for b in blocks))
    kv = _spec_kv(body)
    if name in ("identity", "trace"):
        return random_map(name, n, 0)
    if name == "vector-state":
        return random_map(name, n, int(kv.get("seed", 0)))
    if name == "isometry":
        k = int(kv["k"]) if "k" in kv else None
        return random_map(name, n, int(kv.get("seed", 0)), k=k)
    if name == "mixture":
        return random_map(name, n, int(kv.get("seed", 0)))
    raise InvalidConfig(f"unknown map spec {spec!r}")
