"""Finite-horizon classification of points and pairs.

Each limit notion is discharged by tail extrema over ``[N0, N]`` evaluated at
two horizons, ``N`` and ``2N``.  A predicate is certified or refuted only when
both horizons agree; otherwise it is undecided.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ._kernels import cesaro
from .density import profile_mask
from .operators import DirectSum, is_torus
from .orbit import _torus_point, pair_trace, series_log2, trace
from .spaces import LazyTorusPoint, LazyVector, MetricSpec, TorusPoint, default_metric
from .verdict import Status, Verdict, jsonable

PREDICATES = (
    "asymptotic", "proximal", "semi_irregular", "irregular",
    "mean_asymptotic", "mean_proximal", "mean_semi_irregular", "mean_irregular",
    "distributionally_proximal", "dc2_semi_irregular", "dc1_semi_irregular",
    "distributionally_unbounded",
)


class ConfigError(ValueError):
    pass


class DuplicatePoints(ValueError):
    pass


@dataclass(frozen=True)
class ClassifierConfig:
    """Quantifier discharge policy.

    ``unbounded_level`` and ``growth_factor`` decide "= infinity" clauses: the
    tail maximum must reach the level at both horizons and grow by the factor
    from ``N`` to ``2N``.
    """

    N: int = 1 << 14
    N0: int = None
    eps_small: float = 1e-3
    delta_sep: float = 0.1
    eta: float = 0.1
    m: int = None
    stability_factor: int = 2
    unbounded_level: float = 10.0
    growth_factor: float = 1.25
    blowup_level: float = 1e6
    cesaro_level: float = 100.0
    M_grid: tuple = tuple(10.0 ** k for k in range(0, 7))
    seed: int = 0

    def __post_init__(self):
        if self.N0 is None:
            object.__setattr__(self, "N0", math.ceil(self.N / 2))
        if not 0 < self.eps_small < self.delta_sep:
            raise ConfigError("need 0 < eps_small < delta_sep")
        if not 0 < self.eta < 0.5:
            raise ConfigError("need 0 < eta < 1/2")
        if not 1 <= self.N0 < self.N:
            raise ConfigError("need 1 <= N0 < N")
        if self.stability_factor < 2:
            raise ConfigError("stability factor must be >= 2")

    def at_horizon(self, N):
        return replace(self, N=int(N), N0=max(1, math.ceil(self.N0 * N / self.N)))

    @property
    def horizons(self):
        f = self.stability_factor
        return (self.N, self.N0), (f * self.N, f * self.N0)

    @property
    def eps_levels(self):
        """Proximity levels from ``delta_sep`` down to ``eps_small``."""
        out = []
        e = self.delta_sep
        while e > self.eps_small:
            out.append(e)
            e /= 2
        out.append(self.eps_small)
        return out

    def to_json(self):
        return jsonable(asdict(self))

    def digest(self):
        return config_hash(self.to_json())


def config_hash(obj):
    blob = json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class PointVerdict:
    entries: dict
    evidence: dict = field(default_factory=dict)
    config: ClassifierConfig = None

    def __getitem__(self, key):
        return self.entries[key]

    def status(self, key):
        return self.entries[key].status

    def consistent(self):
        """``True`` when no implication in the verdict hierarchy is violated."""
        chain = [("dc1_semi_irregular", "dc2_semi_irregular"), ("irregular", "semi_irregular"),
                 ("mean_irregular", "mean_semi_irregular"), ("asymptotic", "proximal"),
                 ("mean_asymptotic", "mean_proximal"), ("semi_irregular", "proximal")]
        return all(not self.entries[a].certified or self.entries[b].certified for a, b in chain)

    def to_json(self):
        out = {"predicates": [self.entries[k].to_json() for k in PREDICATES if k in self.entries],
               "evidence": jsonable(self.evidence)}
        if self.config is not None:
            out["config"] = self.config.to_json()
            out["config_hash"] = self.config.digest()
        return out


# ---------------------------------------------------------------- evidence --

def _series_pair(T, x, m, rho, N):
    """Metric trace and ``log2`` of the companion seminorm series at horizon ``N``."""
    tr = trace(T, x, m, N)
    if rho is None:
        return tr, None
    if rho == m and tr.s_log2 is not None:
        return tr, tr.s_log2
    if isinstance(T, DirectSum):
        return tr, trace(T, x, rho, N).s_log2
    return tr, series_log2(T, x, rho, N)


def _density_up(mask, N0):
    return profile_mask(mask, N0)


def horizon_evidence(tr, rho_log2, N0, cfg):
    """All tail statistics used by the predicates, at one horizon."""
    N = tr.N
    s = tr.s
    A = tr.cesaro
    w = slice(N0 - 1, N)
    st, At = s[w], A[w]
    ev = {"N": N, "N0": N0}
    ev["liminf_est"] = float(st.min())
    ev["limsup_est"] = float(st.max())
    ev["liminf_witness"] = int(N0 + np.argmin(st))
    ev["limsup_witness"] = int(N0 + np.argmax(st))
    # Cesàro means of a series that has settled near 0 settle there too
    ev["mean_liminf_est"] = float(min(At.min(), st.max()))
    ev["mean_limsup_est"] = float(min(At.max(), st.max()))
    ev["mean_raw_min"] = float(At.min())
    ev["mean_raw_max"] = float(At.max())
    prox = {}
    for e in cfg.eps_levels:
        prox[repr(e)] = _density_up(s < e, N0).upper_at_tail
    ev["proximal_density"] = prox
    ev["separation_density"] = _density_up(s > cfg.delta_sep, N0).upper_at_tail
    if rho_log2 is not None:
        with np.errstate(over="ignore"):
            rho = np.exp2(rho_log2)
        rt = rho_log2[w]
        ev["rho_max_log2"] = float(rt.max())
        with np.errstate(over="ignore"):
            ev["rho_max"] = float(np.exp2(rt.max()))
        ev["rho_max_witness"] = int(N0 + np.argmax(rt))
        Arho = cesaro(np.where(np.isfinite(rho), rho, math.inf))
        ev["rho_mean_max"] = float(Arho[w].max())
        ev["rho_mean_max_witness"] = int(N0 + np.argmax(Arho[w]))
        dens = {}
        for M in cfg.M_grid:
            dens[repr(M)] = _density_up(rho_log2 > math.log2(M), N0).upper_at_tail
        ev["unbounded_density"] = dens
    return ev


def _decide(test, e1, e2):
    return Status.from_horizons(test(e1), test(e2))


def _growth_status(key, level, e1, e2, cfg, prereq):
    """Decide an "= infinity" clause from tail maxima at two horizons."""
    a, b = e1.get(key), e2.get(key)
    if a is None:
        return Status.UNDECIDED, {"applicable": False}
    if math.isinf(b):
        ratio = math.inf
    else:
        ratio = b / a if a > 0 else (math.inf if b > 0 else 1.0)
    reach = a >= level and b >= level
    grows = ratio >= cfg.growth_factor
    info = {"max_at_N": a, "max_at_2N": b, "growth_ratio": ratio, "level": level,
            "growth_factor": cfg.growth_factor}
    if prereq is Status.REFUTED or (a < level and b < level) or ratio <= 1.0:
        return Status.REFUTED, info
    if prereq is Status.CERTIFIED and reach and grows:
        return Status.CERTIFIED, info
    return Status.UNDECIDED, info


def _conj(*sts):
    if any(s is Status.REFUTED for s in sts):
        return Status.REFUTED
    if all(s is Status.CERTIFIED for s in sts):
        return Status.CERTIFIED
    return Status.UNDECIDED


def verdicts_from_evidence(e1, e2, cfg):
    eps, dsep, eta = cfg.eps_small, cfg.delta_sep, cfg.eta
    V = {}

    def put(name, status, evidence=None, witnesses=None):
        V[name] = Verdict(name, status, evidence or {}, witnesses or [])

    asym = _decide(lambda e: e["limsup_est"] <= eps, e1, e2)
    prox = _decide(lambda e: e["liminf_est"] <= eps, e1, e2)
    big = _decide(lambda e: e["limsup_est"] >= dsep, e1, e2)
    put("asymptotic", asym, {"limsup_est": [e1["limsup_est"], e2["limsup_est"]]},
        [e1["limsup_witness"], e2["limsup_witness"]])
    put("proximal", prox, {"liminf_est": [e1["liminf_est"], e2["liminf_est"]]},
        [e1["liminf_witness"], e2["liminf_witness"]])
    semi = _conj(prox, big)
    put("semi_irregular", semi,
        {"liminf_est": [e1["liminf_est"], e2["liminf_est"]],
         "limsup_est": [e1["limsup_est"], e2["limsup_est"]]},
        [e1["liminf_witness"], e1["limsup_witness"]])
    st, info = _growth_status("rho_max", cfg.unbounded_level, e1, e2, cfg, semi)
    put("irregular", st, info, [e1.get("rho_max_witness"), e2.get("rho_max_witness")]
        if "rho_max_witness" in e1 else [])

    masym = _decide(lambda e: e["mean_limsup_est"] <= eps, e1, e2)
    mprox = _decide(lambda e: e["mean_liminf_est"] <= eps, e1, e2)
    mbig = _decide(lambda e: e["mean_limsup_est"] >= dsep, e1, e2)
    mev = {"mean_liminf_est": [e1["mean_liminf_est"], e2["mean_liminf_est"]],
           "mean_limsup_est": [e1["mean_limsup_est"], e2["mean_limsup_est"]]}
    put("mean_asymptotic", masym, mev)
    put("mean_proximal", _conj(mprox, prox) if masym is not Status.CERTIFIED else Status.CERTIFIED,
        mev)
    msemi = _conj(V["mean_proximal"].status, mbig)
    put("mean_semi_irregular", msemi, mev)
    st, info = _growth_status("rho_mean_max", cfg.unbounded_level, e1, e2, cfg, msemi)
    put("mean_irregular", st, info)

    dprox = _decide(lambda e: min(e["proximal_density"].values()) >= 1 - eta, e1, e2)
    dev = {"proximal_density": [e1["proximal_density"], e2["proximal_density"]],
           "separation_density": [e1["separation_density"], e2["separation_density"]],
           "eta": eta}
    put("distributionally_proximal", dprox, dev)
    put("dc2_semi_irregular", _conj(dprox, _decide(lambda e: e["separation_density"] >= eta,
                                                   e1, e2)), dev)
    put("dc1_semi_irregular", _conj(dprox, _decide(
        lambda e: e["separation_density"] >= 1 - eta, e1, e2)), dev)
    if "unbounded_density" in e1:
        du = _decide(lambda e: min(e["unbounded_density"].values()) >= 1 - eta, e1, e2)
        put("distributionally_unbounded", du,
            {"unbounded_density": [e1["unbounded_density"], e2["unbounded_density"]],
             "M_grid": list(cfg.M_grid)})
    else:
        put("distributionally_unbounded", Status.UNDECIDED, {"applicable": False})
    return V


def _companion(T, m, cfg):
    if is_torus(T) or m is None or m.kind == "torus":
        return None
    return m.seminorm_at(cfg.m)


def classify_point(T, x, m: MetricSpec = None, cfg: ClassifierConfig = None) -> PointVerdict:
    cfg = cfg or ClassifierConfig()
    if m is None:
        if is_torus(T):
            m = MetricSpec.torus()
        elif isinstance(x, LazyVector):
            m = default_metric(x.space)
        else:
            m = default_metric(x.components[0].space)
    rho = _companion(T, m, cfg)
    evs = []
    for N, N0 in cfg.horizons:
        tr, rlg = _series_pair(T, x, m, rho, N)
        evs.append(horizon_evidence(tr, rlg, N0, cfg))
    V = verdicts_from_evidence(evs[0], evs[1], cfg)
    return PointVerdict(V, {"horizon_N": evs[0], "horizon_2N": evs[1],
                            "metric": m.to_json(),
                            "rho": rho.to_json() if rho is not None else None}, cfg)


def classify_pair(T, x, y, m=None, cfg=None, reduce=True) -> PointVerdict:
    """Classify ``(x, y)`` through the point ``y - x``.

    Every metric in this package is translation invariant, so the reduction
    always applies; ``reduce=False`` instead uses directly measured pair
    traces for the metric series.
    """
    cfg = cfg or ClassifierConfig()
    if isinstance(x, LazyTorusPoint) or isinstance(y, LazyTorusPoint):
        bits = max(_torus_point(T, x, cfg.stability_factor * cfg.N).den.bit_length(), 1)
        x, y = _torus_point(T, x, 2 * bits), _torus_point(T, y, 2 * bits)
    if reduce:
        return classify_point(T, y - x, m, cfg)
    if m is None:
        m = MetricSpec.torus() if is_torus(T) else default_metric(x.space)
    rho = _companion(T, m, cfg)
    evs = []
    for N, N0 in cfg.horizons:
        tr = pair_trace(T, x, y, m, N, reduce=False)
        rlg = pair_trace(T, x, y, rho, N, reduce=False).s_log2 if rho is not None else None
        evs.append(horizon_evidence(tr, rlg, N0, cfg))
    V = verdicts_from_evidence(evs[0], evs[1], cfg)
    return PointVerdict(V, {"horizon_N": evs[0], "horizon_2N": evs[1], "metric": m.to_json()},
                        cfg)


FAMILY_KINDS = {
    "LY": None,  # proximal and not asymptotic
    "LY-delta": "semi_irregular",
    "mean": "mean_semi_irregular",
    "DC1": "dc1_semi_irregular",
    "DC2": "dc2_semi_irregular",
}


def _pair_status(pv, kind):
    if kind == "LY":
        prox, asym = pv.status("proximal"), pv.status("asymptotic")
        flipped = {Status.CERTIFIED: Status.REFUTED, Status.REFUTED: Status.CERTIFIED,
                   Status.UNDECIDED: Status.UNDECIDED}[asym]
        return _conj(prox, flipped)
    return pv.status(FAMILY_KINDS[kind])


def _workers():
    try:
        return max(1, int(os.environ.get("CHAOSCOPE_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class FamilyVerdict:
    kind: str
    matrix: list
    status: Status
    pairs: dict

    def to_json(self):
        return {"kind": self.kind, "verdict": self.status.value,
                "matrix": [[None if s is None else s.value for s in row] for row in self.matrix]}


def _same_point(a, b):
    if type(a) is not type(b):
        return False
    if isinstance(a, TorusPoint):
        return a == b
    if isinstance(a, LazyTorusPoint):
        return a == b
    if isinstance(a, LazyVector):
        d = a - b
        if a.is_finite and b.is_finite:
            return d.materialize(d.last_index).is_zero
        return a == b or d.materialize(4096).is_zero
    return a == b


def scrambled_family_check(T, points, kind="LY", m=None, cfg=None) -> FamilyVerdict:
    """Pairwise scrambledness of a finite family; the diagonal is excluded."""
    if kind == "LY-δ":
        kind = "LY-delta"
    if kind not in FAMILY_KINDS:
        raise ConfigError(f"unknown family kind {kind!r}")
    pts = list(points)
    if len(pts) < 2:
        raise ConfigError("need at least two points")
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if _same_point(pts[i], pts[j]):
                raise DuplicatePoints(f"points {i} and {j} coincide")
    cfg = cfg or ClassifierConfig()
    jobs = [(i, j) for i in range(len(pts)) for j in range(i + 1, len(pts))]

    def run(ij):
        i, j = ij
        return classify_pair(T, pts[i], pts[j], m, cfg)

    with ThreadPoolExecutor(max_workers=_workers()) as ex:
        results = list(ex.map(run, jobs))
    k = len(pts)
    matrix = [[None] * k for _ in range(k)]
    pairs = {}
    for (i, j), pv in zip(jobs, results):
        st = _pair_status(pv, kind)
        matrix[i][j] = matrix[j][i] = st
        pairs[(i, j)] = pv
    return FamilyVerdict(kind, matrix, _conj(*[matrix[i][j] for i, j in jobs]), pairs)
