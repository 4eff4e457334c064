"""Seeded instance generation, campaigns and parameter sweeps.

Trial ``i`` of a campaign draws everything from ``numpy.random.default_rng``
seeded with ``trial_seed(seed, i)``, a SplitMix64-style mix of the campaign
seed and the index. Trials are therefore independent of execution order and
a parallel run aggregates to the same report as a serial one.
"""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import constants
from .checks import (
    CHECK_IDS,
    DEFAULT_TOL,
    VARIANTS,
    CheckReport,
    Instance,
    Verdict,
    check_additive_corollary,
    check_additive_theorem,
    check_bellman_classic,
    check_bellman_reversed,
    check_exp_corollary,
    check_geometric_chain,
    check_jensen_vector,
    check_lemma_map_defect,
    check_lemma_mean_defect,
    check_map_jensen,
    check_prop_concave,
    check_prop_convex,
    check_scalar_bellman,
    check_scalar_remark_chain,
    check_thm_power,
    reproduce_counterexample,
)
from .errors import InvalidConfig, UnknownCheck
from .functions import IntervalBounds, PowerOneMinus, parse_function
from .maps import MAP_KINDS, haar_orthogonal, random_map
from .matcore import MAX_DIM, as_symmetric

SCHEMA = "opbell-report/1"
MASK64 = (1 << 64) - 1
SWEEP_COLUMNS = ("r", "m", "M", "K", "K2", "argmax_closed", "argmax_grid", "worst_gap")


def _mix64(z: int) -> int:
    # SplitMix64 finalizer (Steele, Lea, Flood 2014)
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(seed: int, index: int) -> int:
    return _mix64(_mix64(seed & MASK64) ^ (index & MASK64))


def random_symmetric_in(n: int, m: float, M: float, seed) -> np.ndarray:
    """``Q diag(d) Q^T`` with ``d ~ U[m, M]`` i.i.d. and Haar ``Q``."""
    if not 1 <= n <= MAX_DIM:
        raise InvalidConfig(f"dimension {n} outside 1..{MAX_DIM}")
    if m > M:
        raise InvalidConfig(f"m={m} exceeds M={M}")
    if m == M:
        return as_symmetric(m * np.eye(n))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    q = haar_orthogonal(n, n, rng)
    d = rng.uniform(m, M, n)
    return as_symmetric((q * d) @ q.T)


# -- configuration ---------------------------------------------------------------

def parse_r(spec) -> tuple:
    """``"3"`` fixed, ``"2,3,4"`` list, ``"0:1"`` range, ``"-1:0|1:2"`` union of ranges.

    Returns ``("list", values)`` or ``("ranges", ((lo, hi), ...))``.
    """
    if spec is None:
        return None
    if isinstance(spec, (int, float)):
        return ("list", (float(spec),))
    if isinstance(spec, (list, tuple)) and spec and spec[0] in ("list", "ranges"):
        kind, vals = spec
        return (kind, tuple(tuple(v) if isinstance(v, (list, tuple)) else float(v) for v in vals))
    spec = str(spec).strip()
    if ":" in spec:
        ranges = []
        for part in spec.split("|"):
            lo, hi = (float(x) for x in part.split(":"))
            if lo > hi:
                raise InvalidConfig(f"empty r range {part!r}")
            ranges.append((lo, hi))
        return ("ranges", tuple(ranges))
    return ("list", tuple(float(x) for x in spec.split(",") if x))


def _draw_r(rspec, rng) -> float:
    kind, vals = rspec
    if kind == "list":
        return float(vals[int(rng.integers(len(vals)))]) if len(vals) > 1 else float(vals[0])
    widths = np.array([hi - lo for lo, hi in vals])
    j = int(rng.choice(len(vals), p=widths / widths.sum())) if widths.sum() > 0 else 0
    lo, hi = vals[j]
    return float(rng.uniform(lo, hi))


DEFAULTS = {
    # check_id: (m, M, r, f)
    "bellman-classic": (0.0, 0.95, "0:1", None),
    "bellman-reversed": (0.0, 0.95, "-1:0|1:2", None),
    "geometric-chain": (0.05, 0.9, "-1:0", None),
    "jensen-vector": (0.1, 0.9, None, "power:p=0.5"),
    "map-jensen": (0.1, 0.9, None, "power:p=0.5"),
    "prop-concave": (0.1, 0.9, None, "power:p=0.3333333333333333"),
    "prop-convex": (0.1, 0.9, None, "exp"),
    "thm-power": (0.1, 0.5, "3", None),
    "exp-corollary": (0.1, 0.9, None, "exp"),
    "lemma-mean-defect": (0.1, 0.9, None, "power:p=0.5"),
    "lemma-map-defect": (0.1, 0.9, None, "power:p=0.3333333333333333"),
    "additive-theorem": (0.1, 0.9, None, "power:p=0.5"),
    "additive-corollary": (0.1, 0.5, "3", None),
    "counterexample": (0.0, 1.0, None, None),
    "scalar-bellman": (0.0, 1.0, "1,2,3,4", None),
    "scalar-remark-chain": (0.05, 0.95, "2:5", None),
}


@dataclass(frozen=True)
class CampaignConfig:
    check_id: str
    trials: int = 100
    n: int = 4
    m: float | None = None
    M: float | None = None
    r: object = None
    v: object = "uniform"
    maps: tuple = ("all",)
    f: str | None = None
    seed: int = 0
    tol: float = DEFAULT_TOL
    variant: str = "map-first"

    def resolved(self) -> "CampaignConfig":
        """Validate and fill check-specific defaults."""
        if self.check_id not in CHECK_IDS:
            raise UnknownCheck(self.check_id)
        m0, M0, r0, f0 = DEFAULTS[self.check_id]
        m = m0 if self.m is None else float(self.m)
        M = M0 if self.M is None else float(self.M)
        if self.trials < 1:
            raise InvalidConfig(f"trials must be >= 1, got {self.trials}")
        if not 1 <= self.n <= MAX_DIM:
            raise InvalidConfig(f"n must be in 1..{MAX_DIM}, got {self.n}")
        if m > M:
            raise InvalidConfig(f"m={m} exceeds M={M}")
        if not self.tol > 0:
            raise InvalidConfig(f"tol must be positive, got {self.tol}")
        if self.variant not in VARIANTS:
            raise InvalidConfig(f"unknown variant {self.variant!r}")
        v = self.v
        if v != "uniform":
            try:
                v = float(v)
            except (TypeError, ValueError) as exc:
                raise InvalidConfig(f"v must be 'uniform' or a number, got {v!r}") from exc
            if not 0 <= v <= 1:
                raise InvalidConfig(f"v={v} outside [0, 1]")
        maps = tuple(self.maps) if not isinstance(self.maps, str) else tuple(self.maps.split(","))
        if maps == ("all",):
            maps = MAP_KINDS
        for kind in maps:
            if kind not in MAP_KINDS:
                raise InvalidConfig(f"unknown map kind {kind!r}")
        f = self.f if self.f is not None else f0
        if f is not None:
            try:
                parse_function(f)
            except ValueError as exc:
                raise InvalidConfig(str(exc)) from exc
        try:
            r = parse_r(self.r if self.r is not None else r0)
        except ValueError as exc:
            raise InvalidConfig(f"bad r spec {self.r!r}") from exc
        return CampaignConfig(self.check_id, int(self.trials), int(self.n), m, M, r, v, maps, f,
                              int(self.seed), float(self.tol), self.variant)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["maps"] = list(self.maps)
        return d


# -- generators --------------------------------------------------------------------

def _draw_v(cfg, rng) -> float:
    return float(rng.uniform()) if cfg.v == "uniform" else float(cfg.v)


def _draw_map(cfg, rng):
    kind = cfg.maps[int(rng.integers(len(cfg.maps)))]
    return random_map(kind, cfg.n, rng)


def _matrix_instance(cfg, rng, seed, **extra) -> Instance:
    b = IntervalBounds(cfg.m, cfg.M)
    a = random_symmetric_in(cfg.n, cfg.m, cfg.M, rng)
    bb = random_symmetric_in(cfg.n, cfg.m, cfg.M, rng)
    v = _draw_v(cfg, rng)
    phi = _draw_map(cfg, rng)
    return Instance(A=a, B=bb, v=v, phi=phi, bounds=b, seed=seed, variant=cfg.variant, **extra)


def generate_trial(cfg: CampaignConfig, index: int) -> CheckReport:
    """Generate and run trial ``index`` of a resolved config."""
    seed = trial_seed(cfg.seed, index)
    rng = np.random.default_rng(seed)
    cid, tol = cfg.check_id, cfg.tol
    f = parse_function(cfg.f) if cfg.f else None
    if cid == "counterexample":
        return reproduce_counterexample(tol)
    if cid == "scalar-bellman":
        r = int(round(_draw_r(cfg.r, rng)))
        k = int(rng.integers(1, 6))
        a, b = rng.uniform(0.01, 1.0, k), rng.uniform(0.01, 1.0, k)
        # caps at or above the r-norms, sometimes exactly saturated
        a_cap = float(np.sum(a**r) ** (1.0 / r)) * (1.0 + float(rng.uniform(0, 1)) * (rng.uniform() < 0.8))
        b_cap = float(np.sum(b**r) ** (1.0 / r)) * (1.0 + float(rng.uniform(0, 1)) * (rng.uniform() < 0.8))
        return check_scalar_bellman(a, b, a_cap, b_cap, r, tol)
    if cid == "scalar-remark-chain":
        return _remark_chain_trial(cfg, rng)
    if cid == "jensen-vector":
        a = random_symmetric_in(cfg.n, cfg.m, cfg.M, rng)
        u = haar_orthogonal(cfg.n, 1, rng)[:, 0]
        return check_jensen_vector(a, f, u, tol)
    if cid == "lemma-mean-defect":
        inst = _matrix_instance(cfg, rng, seed)
        return check_lemma_mean_defect(inst.A, inst.B, inst.v, f, inst.bounds, tol)
    if cid == "lemma-map-defect":
        inst = _matrix_instance(cfg, rng, seed)
        return check_lemma_map_defect(inst.A, f, inst.phi, inst.bounds, tol)
    r = _draw_r(cfg.r, rng) if cfg.r is not None else None
    inst = _matrix_instance(cfg, rng, seed, r=r, f=f)
    runner = {
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
    }[cid]
    return runner(inst, tol)


def _remark_chain_trial(cfg, rng, max_tries: int = 1000) -> CheckReport:
    """Draw ``a, b, M1, M2, r`` meeting the chain's hypotheses by rejection."""
    for _ in range(max_tries):
        r = _draw_r(cfg.r, rng)
        if r <= 2:
            continue
        k = int(rng.integers(1, 5))
        p = 1.0 / r
        m1, m2 = float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.5, 2.0))
        # target scaled root sums S in [cfg.m, cfg.M], split over k terms
        sa, sb = rng.uniform(cfg.m, cfg.M, 2)
        wa, wb = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
        a = m1 * (sa * wa) ** r
        b = m2 * (sb * wb) ** r
        if np.any(a <= 0) or np.any(b <= 0):
            continue
        v = m2 / (m1 + m2)
        if float(np.sum(((1 - v) * a / m1 + v * b / m2) ** p)) >= 1.0:
            continue
        bounds = IntervalBounds(cfg.m, cfg.M)
        return check_scalar_remark_chain(a, b, m1, m2, r, bounds, cfg.tol)
    raise InvalidConfig("could not draw a remark-chain instance meeting its hypotheses")


# -- campaigns -------------------------------------------------------------------

@dataclass
class CampaignReport:
    config: CampaignConfig
    counts: dict
    worst_gap: float
    worst_index: int | None
    worst_instance: dict | None
    median_gap: float
    runtime: float
    violations: list = field(default_factory=list)

    @property
    def failures(self) -> int:
        return self.counts[Verdict.VIOLATED.value] + self.counts[Verdict.INCOMPARABLE.value]

    def to_dict(self, include_runtime: bool = True) -> dict:
        d = {
            "schema": SCHEMA,
            "config": self.config.to_dict(),
            "counts": dict(self.counts),
            "worst_gap": _num(self.worst_gap),
            "worst_index": self.worst_index,
            "worst_instance": self.worst_instance,
            "median_gap": _num(self.median_gap),
            "violations": self.violations,
        }
        if include_runtime:
            d["runtime"] = self.runtime
        return d


def _num(x: float):
    return x if math.isfinite(x) else None


def _trial_summary(cfg: CampaignConfig, index: int) -> dict:
    rep = generate_trial(cfg, index)
    out = {"index": index, "verdict": rep.verdict.value, "gap": rep.min_eig_gap,
           "instance": rep.instance}
    if rep.notes:
        out["notes"] = rep.to_dict()["notes"]
    return out


def _run_chunk(args) -> list:
    cfg, lo, hi = args
    return [_trial_summary(cfg, i) for i in range(lo, hi)]


def run_campaign(cfg: CampaignConfig, workers: int = 1) -> CampaignReport:
    """Run ``cfg.trials`` trials and aggregate.

    ``violations`` lists every failing trial (``Violated`` or
    ``Incomparable``) in index order with its replayable instance record.
    """
    cfg = cfg.resolved()
    start = time.perf_counter()
    if workers > 1 and cfg.trials > 1:
        step = max(1, math.ceil(cfg.trials / (4 * workers)))
        chunks = [(cfg, lo, min(lo + step, cfg.trials)) for lo in range(0, cfg.trials, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [row for part in pool.map(_run_chunk, chunks) for row in part]
    else:
        results = _run_chunk((cfg, 0, cfg.trials))
    runtime = time.perf_counter() - start

    counts = {v.value: 0 for v in Verdict}
    gaps = []
    violations = []
    worst = (math.inf, None, None)
    for row in results:
        counts[row["verdict"]] += 1
        if row["verdict"] == Verdict.HYPOTHESIS_UNMET.value:
            continue
        gaps.append(row["gap"])
        if row["gap"] < worst[0]:
            worst = (row["gap"], row["index"], row["instance"])
        if Verdict(row["verdict"]).failed:
            violations.append({k: row[k] for k in ("index", "verdict", "gap", "instance", "notes")
                               if k in row})
    median = float(np.median(gaps)) if gaps else math.nan
    worst_gap = worst[0] if worst[1] is not None else math.nan
    return CampaignReport(cfg, counts, worst_gap, worst[1], worst[2], median, runtime, violations)


# -- sweeps ----------------------------------------------------------------------

def parse_grid(spec: str) -> list[float]:
    """``"2.5:5:0.5"`` (start:stop:step, inclusive) or ``"3,4"``."""
    spec = str(spec).strip()
    if spec.count(":") == 2:
        start, stop, step = (float(x) for x in spec.split(":"))
        if step <= 0:
            raise InvalidConfig("grid step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise InvalidConfig(f"empty grid {spec!r}")
        return [start + i * step for i in range(count)]
    vals = [float(x) for x in spec.split(",") if x]
    if not vals:
        raise InvalidConfig(f"empty grid {spec!r}")
    return vals


def sweep(r_values, intervals, trials: int = 20, n: int = 4, seed: int = 0,
          tol: float = DEFAULT_TOL, workers: int = 1) -> list[dict]:
    """Constants and the worst ``thm-power`` gap over a grid of ``r`` and ``(m, M)``."""
    r_values = list(r_values)
    intervals = list(intervals)
    if not r_values or not intervals:
        raise InvalidConfig("sweep grid is empty")
    rows = []
    for m, M in intervals:
        b = IntervalBounds(m, M)
        for r in r_values:
            f = PowerOneMinus(r)
            kc = constants.kantorovich(f, b, sense="max")
            kg = constants.kantorovich(f, b, method="grid", sense="max")
            worst = math.nan
            if trials > 0:
                cfg = CampaignConfig("thm-power", trials=trials, n=n, m=m, M=M, r=r, seed=seed,
                                     tol=tol)
                rep = run_campaign(cfg, workers=workers)
                worst = rep.worst_gap
            rows.append({"r": r, "m": m, "M": M, "K": kc.value, "K2": kc.value**2,
                         "argmax_closed": kc.argmax_t, "argmax_grid": kg.argmax_t,
                         "worst_gap": worst})
    return rows


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([format(row[c], ".17g") for c in SWEEP_COLUMNS])
    return buf.getvalue()
