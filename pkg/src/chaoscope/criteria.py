"""Operator-level detectors.

"For every x" quantifiers are discharged by sampling a probe set; every
result here is evidence at a finite horizon, never a proof.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .classify import ClassifierConfig, PointVerdict, classify_point, _workers
from .density import extract_density_one_subset, profile_mask
from .operators import (DirectSum, UnsupportedOracle, WeightedShift, as_torus_matrix, is_torus,
                        linear_form)
from .orbit import series_log2, trace
from .spaces import (L2, LazyTorusPoint, LazyVector, MetricSpec, PatternSupport, TorusPoint,
                     default_metric)
from .verdict import Status, Verdict, jsonable


class CriterionInputError(ValueError):
    pass


class ConstructionFailure(RuntimeError):
    def __init__(self, message, diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


# ------------------------------------------------------------------ probes --

@dataclass(frozen=True)
class ProbeSet:
    vectors: tuple
    ladder: tuple = tuple(2.0 ** -k for k in range(4, 13))
    labels: tuple = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"probe{i}" for i in range(len(self.vectors))))


def block_vector(r=2.0, space=None, offset=0, k_min=2):
    """``sum_k k r^-(k^2 - offset) e_{k^2 - offset}``; peaks grow like ``k`` under a shift
    of growth rate ``r``."""
    idx = "k^2" if offset == 0 else f"k^2-{offset}"
    kmin = max(k_min, math.isqrt(offset) + 1)
    amp = f"k*{float(r)!r}^(-n)"
    return LazyVector(space or L2, ((1.0, PatternSupport(idx, amp, kmin)),))


def _unit(v):
    p = v.space.p if v.space.kind == "lp" else 2.0
    c = v.materialize(v.norm_support_index())
    return (2.0 ** -c.norm_log2(p)) * v


def default_probes(T, cfg: ClassifierConfig, J=16, n_random=8):
    """Unit probes: ``e_1..e_J``, ``e_{2^i+1}`` up to the horizon, seeded random
    finitely supported vectors and a normalized block vector."""
    if is_torus(T):
        k = as_torus_matrix(T).dim
        vecs, labels = [], []
        for j in range(1, 17):
            for c in range(k):
                nums = [0] * k
                nums[c] = 1
                vecs.append(TorusPoint.dyadic(nums, j))
                labels.append(f"2^-{j}@{c}")
        return ProbeSet(tuple(vecs), labels=tuple(labels))
    space = T.space
    vecs, labels = [], []
    for j in range(1, J + 1):
        vecs.append(LazyVector.basis(j, space))
        labels.append(f"e{j}")
    i = int(math.log2(J))
    while (1 << i) + 1 <= cfg.N + 1:
        j = (1 << i) + 1
        if j > J:
            vecs.append(LazyVector.basis(j, space))
            labels.append(f"e{j}")
        i += 1
    rng = np.random.default_rng(cfg.seed)
    for t in range(n_random):
        vals = rng.standard_normal(J)
        vecs.append(_unit(LazyVector.finite(list(zip(range(1, J + 1), vals.tolist())), space)))
        labels.append(f"random{t}")
    vecs.append(_unit(block_vector(2.0, space)))
    labels.append("block")
    return ProbeSet(tuple(vecs), labels=tuple(labels))


def _norm_p(space):
    return space.p if space.kind == "lp" else 2.0


def _probe_norm_log2(x):
    c = x.materialize(x.norm_support_index())
    return c.norm_log2(_norm_p(x.space))


def _rho(T, m):
    if m is None:
        return default_metric(T.space).unbounded_companion()
    return m.unbounded_companion()


# -------------------------------------------------------------- dichotomies --

@dataclass
class DichotomyVerdict:
    side: str
    kind: str = "topological"
    witness: dict = None
    bound: float = None
    evidence: dict = field(default_factory=dict)

    @property
    def sensitive(self):
        return self.side.endswith("sensitive-like") or self.side == "mean-L-unstable-like"

    def to_json(self):
        return jsonable({"kind": self.kind, "side": self.side, "witness": self.witness,
                         "bound": self.bound, "evidence": self.evidence})


def _torus_dichotomy(T, probes, cfg):
    N = cfg.N
    best = {}
    for x, lab in zip(probes.vectors, probes.labels):
        d0 = float(x.dist0_exact())
        tr = trace(T, x, MetricSpec.torus(), N)
        s_max = float(max(d0, tr.s.max()))
        n_at = int(np.argmax(tr.s)) + 1
        for sc in probes.ladder:
            if d0 <= sc and s_max >= cfg.delta_sep:
                cur = best.get(sc)
                if cur is None or n_at < cur["n"]:
                    best[sc] = {"probe": lab, "n": n_at, "distance": s_max, "initial": d0}
    if all(sc in best for sc in probes.ladder):
        return DichotomyVerdict("sensitive-like", witness=best[probes.ladder[-1]],
                                evidence={"ladder": {repr(k): v for k, v in best.items()},
                                          "delta": cfg.delta_sep})
    bound = 0.0
    for x in probes.vectors:
        tr = trace(T, x, MetricSpec.torus(), N)
        bound = max(bound, float(tr.s.max()), float(x.dist0_exact()))
    return DichotomyVerdict("equicontinuous-like", bound=bound,
                            evidence={"scales_reached": sorted(best), "delta": cfg.delta_sep})


def equicontinuity_dichotomy(T, probes: ProbeSet = None, cfg: ClassifierConfig = None,
                             m: MetricSpec = None) -> DichotomyVerdict:
    """Sensitive-like iff some probe orbit exceeds ``blowup_level`` within the horizon.

    For linear operators this is the Banach-Steinhaus reduction: equicontinuity
    is boundedness of every orbit.
    """
    cfg = cfg or ClassifierConfig()
    if isinstance(T, DirectSum):
        parts = [equicontinuity_dichotomy(P, None, cfg) for P in T.parts]
        for i, v in enumerate(parts):
            if v.sensitive:
                return DichotomyVerdict("sensitive-like", witness={"part": i, **(v.witness or {})})
        return DichotomyVerdict("equicontinuous-like", bound=max(v.bound for v in parts))
    probes = probes or default_probes(T, cfg)
    if is_torus(T):
        return _torus_dichotomy(T, probes, cfg)
    rho = _rho(T, m)
    level = math.log2(cfg.blowup_level)
    first = None
    bound_lg = -math.inf
    norms = []
    for x, lab in zip(probes.vectors, probes.labels):
        lg0 = _probe_norm_log2(x)
        norms.append(lg0)
        lg = series_log2(T, x, rho, cfg.N)
        hit = np.flatnonzero(lg > level)
        if hit.size:
            n = int(hit[0]) + 1
            if first is None or n < first["n"]:
                first = {"probe": lab, "n": n, "norm": float(2.0 ** lg[n - 1]) if lg[n - 1] < 1024
                         else math.inf, "initial_norm": float(2.0 ** lg0)}
        bound_lg = max(bound_lg, lg0, float(lg.max()))
    max_probe = float(2.0 ** max(norms))
    if first is not None:
        return DichotomyVerdict("sensitive-like", witness=first,
                                evidence={"level": cfg.blowup_level, "max_probe_norm": max_probe})
    return DichotomyVerdict("equicontinuous-like", bound=float(2.0 ** bound_lg),
                            evidence={"max_probe_norm": max_probe, "horizon": cfg.N})


@dataclass
class CesaroBound:
    bounded: bool
    C: float
    witness: dict = None
    per_probe: list = field(default_factory=list)

    def to_json(self):
        return jsonable({"bounded": self.bounded, "C": self.C, "witness": self.witness,
                         "per_probe": self.per_probe})


def absolutely_cesaro_bounded(T, probes: ProbeSet = None, cfg: ClassifierConfig = None,
                              p=None) -> CesaroBound:
    """Estimate ``C = sup_x sup_n A_n(x) / ||x||``; a single probe whose ratio
    exceeds ``cesaro_level`` is reported as counter-witness."""
    cfg = cfg or ClassifierConfig()
    if is_torus(T) or isinstance(T, DirectSum):
        raise UnsupportedOracle("absolute Cesàro boundedness needs a Banach norm")
    probes = probes or default_probes(T, cfg)
    m = MetricSpec.banach(p if p is not None else _norm_p(T.space))
    per = []
    first = None
    C = 0.0
    for x, lab in zip(probes.vectors, probes.labels):
        nx = 2.0 ** _probe_norm_log2(x)
        A = trace(T, x, m, cfg.N).cesaro / nx
        k = int(np.argmax(A))
        per.append({"probe": lab, "max_ratio": float(A[k]), "n": k + 1})
        C = max(C, float(A[k]))
        hit = np.flatnonzero(A > cfg.cesaro_level)
        if hit.size and (first is None or hit[0] + 1 < first["n"]):
            n = int(hit[0]) + 1
            first = {"probe": lab, "n": n, "ratio": float(A[n - 1])}
    return CesaroBound(first is None, C, first, per)


def mean_equicontinuity_dichotomy(T, probes=None, cfg=None) -> DichotomyVerdict:
    """On Banach spaces mean equicontinuity is absolute Cesàro boundedness."""
    res = absolutely_cesaro_bounded(T, probes, cfg)
    if res.bounded:
        return DichotomyVerdict("mean-equicontinuous-like", "mean", bound=res.C)
    return DichotomyVerdict("mean-sensitive-like", "mean", witness=res.witness)


# ---------------------------------------------------------------- criteria --

def _check_span(X0, vecs, what):
    """Reject vectors outside ``span(X0)`` (finitely supported members only)."""
    if not all(x.is_finite for x in X0):
        return
    supports = [x.materialize(x.last_index).idx for x in X0]
    if all(sp.size == 1 for sp in supports):
        # seeds are multiples of basis vectors: the span is their coordinates
        allowed = {int(sp[0]) for sp in supports}
        for k, v in enumerate(vecs):
            if not v.is_finite:
                raise CriterionInputError(f"{what}[{k}] must be finitely supported")
            if not set(v.materialize(v.last_index).idx.tolist()) <= allowed:
                raise CriterionInputError(f"{what}[{k}] is not in the span of X0")
        return
    top = max([x.last_index for x in X0] + [v.last_index or 0 for v in vecs] + [1])
    basis = np.zeros((top, len(X0)), dtype=complex)
    for i, x in enumerate(X0):
        c = x.materialize(top)
        basis[c.idx - 1, i] = c.values()
    for k, v in enumerate(vecs):
        if not v.is_finite:
            raise CriterionInputError(f"{what}[{k}] must be finitely supported")
        c = v.materialize(top)
        b = np.zeros(top, dtype=complex)
        b[c.idx - 1] = c.values()
        coef, *_ = np.linalg.lstsq(basis, b, rcond=None)
        if np.linalg.norm(basis @ coef - b) > 1e-9 * max(1.0, np.linalg.norm(b)):
            raise CriterionInputError(f"{what}[{k}] is not in the span of X0")


def _check_seeds(X0):
    if not X0:
        raise CriterionInputError("X0 must be non-empty")
    for i, x in enumerate(X0):
        if x.materialize(x.norm_support_index()).is_zero:
            raise CriterionInputError(f"X0[{i}] is the zero vector")


def check_LY_criterion(T, X0, a_seq, cfg: ClassifierConfig = None, m=None) -> Verdict:
    """(1) every seed has a subsequence of its orbit tending to 0;
    (2) a bounded sequence ``a_n`` with ``||T^n a_n||`` unbounded."""
    cfg = cfg or ClassifierConfig()
    X0 = list(X0)
    _check_seeds(X0)
    a_seq = list(a_seq)
    if not a_seq:
        raise CriterionInputError("a_seq must be non-empty")
    _check_span(X0, a_seq, "a_seq")
    m = m or default_metric(T.space)
    rho = m.unbounded_companion()
    seeds = []
    for i, x in enumerate(X0):
        tr = trace(T, x, m, cfg.N)
        k = int(np.argmin(tr.s))
        seeds.append({"seed": i, "min_s": float(tr.s[k]), "n": k + 1})
    cond1 = all(s["min_s"] <= cfg.eps_small for s in seeds)
    sup_a = max(float(2.0 ** _probe_norm_log2(a)) for a in a_seq)
    growth = []
    for n, a in enumerate(a_seq, start=1):
        lg = series_log2(T, a, rho, max(n, 2))[n - 1]
        growth.append(float(2.0 ** lg) if lg < 1024 else math.inf)
    best = int(np.argmax(growth))
    cond2 = growth[best] >= 1.0 / cfg.eps_small
    ev = {"condition_1": cond1, "condition_2": cond2, "sup_a_norm": sup_a,
          "max_orbit_norm": growth[best], "level": 1.0 / cfg.eps_small, "seeds": seeds}
    st = Status.CERTIFIED if cond1 and cond2 else Status.REFUTED
    return Verdict("LY_criterion", st, ev, [best + 1])


def _fraction_sum(vals):
    return Fraction(math.fsum(vals))


def check_mean_LY_criterion(T, X0, y_seq, N_seq, cfg: ClassifierConfig = None,
                            cap=10) -> Verdict:
    """(1) every seed has ``liminf A_n = 0``; (2) ``A_{N_k}(y_k) >= k ||y_k||``.

    Condition (2) is decided on exact rationals: each ``||T^i y_k||`` is a float
    and the sum is compared through its correctly rounded value.
    """
    cfg = cfg or ClassifierConfig()
    X0 = list(X0)
    _check_seeds(X0)
    y_seq, N_seq = list(y_seq), [int(n) for n in N_seq]
    if len(y_seq) != len(N_seq) or not y_seq:
        raise CriterionInputError("y_seq and N_seq must be non-empty and of equal length")
    _check_span(X0, y_seq, "y_seq")
    m = MetricSpec.banach(_norm_p(T.space))
    seeds = []
    for i, x in enumerate(X0):
        tr = trace(T, x, m, cfg.N)
        w = tr.s[cfg.N0 - 1:]
        est = float(min(tr.cesaro[cfg.N0 - 1:].min(), w.max()))
        seeds.append({"seed": i, "mean_liminf_est": est})
    cond1 = all(s["mean_liminf_est"] <= cfg.eps_small for s in seeds)
    rows = []
    ok = True
    for k, (y, Nk) in enumerate(zip(y_seq[:cap], N_seq[:cap]), start=1):
        s = trace(T, y, m, max(Nk, 2)).s[:Nk]
        total = _fraction_sum(s)
        ny = Fraction(2.0 ** _probe_norm_log2(y))
        holds = total >= k * Nk * ny
        rows.append({"k": k, "N_k": Nk, "mean": float(total / Nk), "k_norm": float(k * ny),
                     "holds": bool(holds)})
        ok &= bool(holds)
    ev = {"condition_1": cond1, "condition_2": ok, "rows": rows, "seeds": seeds}
    st = Status.CERTIFIED if cond1 and ok else Status.REFUTED
    return Verdict("mean_LY_criterion", st, ev, [r["k"] for r in rows if not r["holds"]])


def dc_criterion_inputs(cfg: ClassifierConfig = None, K=10):
    """Block sequences for an expanding unit-step shift: ``x_k = e_k`` and
    ``y_k = 2^-k e_{N_k+1}`` with ``N_k = k (k + ceil(log2(1/delta)) + 1)``."""
    cfg = cfg or ClassifierConfig()
    L = math.ceil(math.log2(1.0 / cfg.delta_sep))
    N_seq = [k * (k + L + 1) for k in range(1, K + 1)]
    y_seq = [LazyVector.basis(n + 1, value=2.0 ** -k) for k, n in enumerate(N_seq, start=1)]
    x_seq = [LazyVector.basis(j) for j in range(1, N_seq[-1] + 2)]
    return x_seq, y_seq, N_seq


def check_DC_criterion(T, x_seq, y_seq, N_seq, cfg: ClassifierConfig = None,
                       delta=None) -> Verdict:
    """(1) a common upper-density-one set along which every ``T^n x_k -> 0``;
    (2) ``y_k -> 0`` in the span of the ``x_k`` and
    ``card{i <= N_k : d(T^i y_k, 0) > delta} >= N_k (1 - 1/k)``, by integer counting."""
    cfg = cfg or ClassifierConfig()
    x_seq, y_seq, N_seq = list(x_seq), list(y_seq), [int(n) for n in N_seq]
    if not x_seq:
        raise CriterionInputError("x_seq must be non-empty")
    if len(y_seq) != len(N_seq) or not y_seq:
        raise CriterionInputError("y_seq and N_seq must be non-empty and of equal length")
    if any(b <= a for a, b in zip(N_seq, N_seq[1:])):
        raise CriterionInputError("N_seq must be increasing")
    _check_span(x_seq, y_seq, "y_seq")
    delta = cfg.delta_sep if delta is None else float(delta)
    m = default_metric(T.space)
    N = cfg.N
    common = np.ones(N, bool)
    flags = []
    for x in x_seq:
        res = extract_density_one_subset(trace(T, x, m, N).s, margin=cfg.eta, N0=cfg.N0)
        flags.append(res.flag)
        common &= res.subset.mask(N)
    dens = profile_mask(common, cfg.N0).upper_at_tail
    cond1 = all(f is Status.CERTIFIED for f in flags) and dens >= 1 - cfg.eta
    norms = [float(2.0 ** _probe_norm_log2(y)) for y in y_seq]
    to_zero = all(b <= a for a, b in zip(norms, norms[1:])) and norms[-1] <= cfg.eps_small
    rows = []
    ok = True
    for k, (y, Nk) in enumerate(zip(y_seq, N_seq), start=1):
        s = trace(T, y, m, max(Nk, 2)).s[:Nk]
        count = int(np.count_nonzero(s > delta))
        holds = count * k >= Nk * (k - 1)
        rows.append({"k": k, "N_k": Nk, "count": count, "holds": bool(holds)})
        ok &= holds
    ev = {"condition_1": cond1, "common_density": dens,
          "x_flags": [f.value for f in flags], "y_norms": norms, "y_to_zero": to_zero,
          "condition_2": bool(ok and to_zero), "delta": delta, "rows": rows}
    st = Status.CERTIFIED if cond1 and ok and to_zero else Status.REFUTED
    return Verdict("DC_criterion", st, ev, [r["k"] for r in rows if not r["holds"]])


# ------------------------------------------------------------------ search --

def growth_rate(T, window=4096):
    """Per-step weight growth ``r`` of a (scaled) weighted shift, ``None`` otherwise."""
    try:
        scale, base = linear_form(T)
    except UnsupportedOracle:
        return None
    if not isinstance(base, WeightedShift) or scale == 0:
        return None
    return 2.0 ** (base.weights.growth_log2(1, window) + math.log2(abs(scale)))


@dataclass
class SearchResult:
    candidate: object
    verdict: PointVerdict
    status: Verdict

    def to_json(self):
        return {"candidate": self.candidate.to_json() if self.candidate is not None else None,
                "status": self.status.to_json(),
                "verdict": self.verdict.to_json() if self.verdict is not None else None}


def _search_target(T):
    return "semi_irregular" if is_torus(T) else "irregular"


def search_irregular(T, strategy="block", m=None, cfg: ClassifierConfig = None) -> SearchResult:
    """Look for an irregular vector (semi-irregular point on a torus)."""
    cfg = cfg or ClassifierConfig()
    target = _search_target(T)
    cands = []
    if strategy == "block":
        if is_torus(T):
            A = as_torus_matrix(T).matrix
            if len(A) != 1 or abs(A[0][0]) < 2:
                raise UnsupportedOracle("block-binary search needs a map x -> b x on the circle, |b| >= 2")
            cands = [LazyTorusPoint("k^2", base=abs(A[0][0]))]
        else:
            try:
                _, base = linear_form(T)
            except UnsupportedOracle as exc:
                raise UnsupportedOracle("block strategy needs a shift or diagonal kind") from exc
            r = growth_rate(T)
            if r is not None and r > 1.0:
                cands = [block_vector(r, T.space)]
    elif strategy == "basis":
        if is_torus(T):
            cands = [TorusPoint.dyadic([1] + [0] * (as_torus_matrix(T).dim - 1), j)
                     for j in (3, 7, 13)]
        else:
            cands = [LazyVector.basis(j, T.space) for j in (1, 2, 8, 64)]
    elif strategy == "random":
        if is_torus(T):
            raise UnsupportedOracle("random strategy is defined for sequence spaces")
        rng = np.random.default_rng(cfg.seed)
        for _ in range(4):
            vals = rng.standard_normal(32)
            cands.append(LazyVector.finite(list(zip(range(1, 33), vals.tolist())), T.space))
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    last = None
    for c in cands:
        pv = classify_point(T, c, m, cfg)
        last = (c, pv)
        if pv[target].certified:
            return SearchResult(c, pv, Verdict("search_irregular", Status.CERTIFIED,
                                               {"strategy": strategy, "target": target}))
    ev = {"strategy": strategy, "target": target, "candidates": len(cands)}
    if last is None:
        return SearchResult(None, None, Verdict("search_irregular", Status.REFUTED, ev))
    return SearchResult(None, last[1], Verdict("search_irregular", Status.REFUTED, ev))


# ---------------------------------------------------------------- manifold --

@dataclass
class ManifoldReport:
    basis: list
    certified: bool
    samples: int = 0
    passed: int = 0
    distances: list = field(default_factory=list)
    offsets: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return jsonable({"basis": [b.to_json() for b in self.basis], "certified": self.certified,
                         "samples": self.samples, "passed": self.passed,
                         "distances": self.distances, "offsets": self.offsets,
                         "diagnostics": self.diagnostics})


def _small_set(T, v, m, cfg):
    tr = trace(T, v, m, cfg.N)
    return tr.s <= cfg.eps_small, tr


def _peak_times(tr, N0):
    """Tail indices where ``s_n`` is a strict local maximum above 1."""
    s = tr.s
    n = np.arange(N0, s.size - 1)
    loc = (s[n - 1] > s[n - 2]) & (s[n - 1] > s[n]) & (s[n - 1] > 1.0)
    return n[loc]


def construct_irregular_manifold(T, targets, m=None, cfg: ClassifierConfig = None,
                                 samples=100, pool=8) -> ManifoldReport:
    """Basis ``x_i = y_i + c_i b_i`` of a dense irregular manifold near the targets.

    ``b_i`` are block vectors on shifted supports ``k^2 - o_i``.  A candidate
    offset is accepted when its orbit vanishes at the peak times of every
    earlier pick and along their common vanishing set; this is the finite form
    of the nested subsequence extraction.  The span is then certified by
    classifying ``samples`` seeded random unit combinations.
    """
    cfg = cfg or ClassifierConfig()
    targets = list(targets)
    if not targets:
        return ManifoldReport([], True)
    diag = {}
    if is_torus(T) or isinstance(T, DirectSum):
        raise ConstructionFailure("manifold construction needs a sequence-space operator",
                                  {"kind": T.kind})
    m = m or default_metric(T.space)
    dich = equicontinuity_dichotomy(T, None, cfg.at_horizon(min(cfg.N, 4096)))
    diag["dichotomy"] = dich.to_json()
    r = growth_rate(T)
    diag["growth_rate"] = r
    if not dich.sensitive or r is None or r <= 1.0:
        raise ConstructionFailure("no irregular candidates: the operator is not sensitive-like",
                                  diag)
    p = _norm_p(T.space)
    basis, offsets, dists = [], [], []
    peaks = []
    common = np.ones(cfg.N, bool)
    tried = []
    next_o = 0
    for i, y in enumerate(targets, start=1):
        accepted = None
        for o in range(next_o, next_o + pool):
            b = block_vector(r, T.space, offset=o)
            small, tr = _small_set(T, b, m, cfg)
            ok_peaks = all(small[n - 1] for n in peaks)
            tail = common[cfg.N0 - 1:]
            along = small[cfg.N0 - 1:][tail]
            ok_common = along.size > 0 and along.mean() >= 1 - cfg.eta
            tried.append({"i": i, "offset": o, "vanish_at_peaks": ok_peaks,
                          "vanish_along_common": bool(ok_common)})
            if ok_peaks and ok_common:
                accepted = (o, b, small, tr)
                break
        if accepted is None:
            diag["tried"] = tried
            raise ConstructionFailure(f"candidate pool exhausted at target {i}", diag)
        o, b, small, tr = accepted
        nb = 2.0 ** b.materialize(b.norm_support_index()).norm_log2(p)
        c = 0.5 / (i * nb)
        x = y + c * b
        dist = c * nb
        if not dist < 1.0 / i:
            diag["tried"] = tried
            raise ConstructionFailure(f"proximity 1/{i} violated", diag)
        basis.append(x)
        offsets.append(o)
        dists.append(dist)
        peaks.extend(int(n) for n in _peak_times(tr, cfg.N0))
        ysmall, _ = _small_set(T, y, m, cfg)
        common &= small & ysmall
        next_o = o + 1
    diag["tried"] = tried
    passed, failures = certify_span(T, basis, m, cfg, samples)
    diag["failures"] = failures[:5]
    return ManifoldReport(basis, passed == samples, samples, passed, dists, offsets, diag)


def certify_span(T, basis, m, cfg, samples=100):
    """Classify seeded random unit combinations of ``basis``; count irregular verdicts."""
    rng = np.random.default_rng(cfg.seed)
    combos = []
    for _ in range(samples):
        a = rng.standard_normal(len(basis))
        a /= np.linalg.norm(a)
        v = basis[0] * float(a[0])
        for ai, bi in zip(a[1:], basis[1:]):
            v = v + float(ai) * bi
        combos.append((a, _unit(v)))

    def run(item):
        return classify_point(T, item[1], m, cfg)["irregular"]

    with ThreadPoolExecutor(max_workers=_workers()) as ex:
        results = list(ex.map(run, combos))
    failures = [{"coefficients": a.tolist(), "status": v.status.value, "evidence": v.evidence}
                for (a, _), v in zip(combos, results) if not v.certified]
    return samples - len(failures), failures


# ---------------------------------------------------------- distributional --

def distributional_probe_vector(T, space=None):
    """``y = sum_k r^(-2^k / 2) e_{2^k}``: the orbit norm passes every level ``M``
    shortly after each ``2^(k-1)`` and stays above it until ``2^k``."""
    r = growth_rate(T)
    if r is None or r <= 1.0:
        return None
    amp = f"{float(r)!r}^(-n/2)"
    return LazyVector(space or T.space, ((1.0, PatternSupport("2^k", amp, 1)),))


def distributional_sensitivity_probe(T, cfg: ClassifierConfig = None, probes=None) -> Verdict:
    """Search for a distributionally unbounded orbit.

    On a Banach space a certified witness also reports mean-L-instability.
    """
    cfg = cfg or ClassifierConfig()
    if is_torus(T):
        raise UnsupportedOracle("distributional unboundedness needs an unbounded seminorm")
    m = default_metric(T.space)
    cands, labels = [], []
    y = distributional_probe_vector(T)
    if y is not None:
        cands.append(y)
        labels.append("block")
    pr = probes or default_probes(T, cfg.at_horizon(min(cfg.N, 64)), J=4, n_random=2)
    cands.extend(pr.vectors)
    labels.extend(pr.labels)
    tried = []
    for v, lab in zip(cands, labels):
        pv = classify_point(T, v, m, cfg)
        e = pv["distributionally_unbounded"]
        tried.append({"probe": lab, "status": e.status.value})
        if e.certified:
            ev = {"witness": lab, "distributionally_sensitive": True,
                  "mean_L_unstable": m.kind == "banach", "evidence": e.evidence}
            return Verdict("distributional_sensitivity", Status.CERTIFIED, ev, [lab])
    return Verdict("distributional_sensitivity", Status.REFUTED,
                   {"tried": tried, "distributionally_sensitive": False, "mean_L_unstable": False})


def mean_L_dichotomy(T, cfg=None) -> DichotomyVerdict:
    v = distributional_sensitivity_probe(T, cfg)
    if v.certified:
        return DichotomyVerdict("mean-L-unstable-like", "mean_L", witness={"probe": v.witnesses[0]})
    return DichotomyVerdict("mean-L-stable-like", "mean_L")
