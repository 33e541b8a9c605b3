"""Natural density of subsets of the positive integers at a finite horizon.

Upper and lower densities are limsup and liminf of ``card(A ∩ [1, n]) / n``.
At horizon ``N`` they are estimated by the extrema of that ratio over a tail
window ``[N0, N]``.  All counting is exact integer arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .verdict import Status


class DensityConfigError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NatSubset:
    """A subset of ``{1, 2, ...}`` observed up to ``horizon``.

    Exactly one of ``indicator`` (vectorized predicate on an int array) or
    ``indices`` (strictly increasing positive integers) is given.
    """

    horizon: int
    indicator: object = None
    indices: np.ndarray = None

    def __post_init__(self):
        if (self.indicator is None) == (self.indices is None):
            raise DensityConfigError("give exactly one of indicator or indices")
        if self.indices is not None:
            idx = np.asarray(self.indices, dtype=np.int64)
            if idx.size and (idx[0] < 1 or np.any(np.diff(idx) <= 0)):
                raise DensityConfigError("indices must be strictly increasing and >= 1")
            object.__setattr__(self, "indices", idx[idx <= self.horizon])

    @classmethod
    def from_mask(cls, mask):
        """``mask[n-1]`` tells whether ``n`` belongs to the set."""
        mask = np.asarray(mask, dtype=bool)
        return cls(mask.size, indices=np.flatnonzero(mask) + 1)

    @classmethod
    def from_predicate(cls, pred, horizon):
        return cls(int(horizon), indicator=pred)

    @classmethod
    def everything(cls, horizon):
        return cls(int(horizon), indicator=lambda n: np.ones(n.shape, bool))

    def mask(self, N=None):
        N = self.horizon if N is None else int(N)
        if self.indicator is not None:
            n = np.arange(1, N + 1, dtype=np.int64)
            return np.asarray(self.indicator(n), dtype=bool)
        out = np.zeros(N, bool)
        idx = self.indices[self.indices <= N]
        out[idx - 1] = True
        return out

    def materialize(self):
        return np.flatnonzero(self.mask()) + 1

    def complement(self):
        return NatSubset.from_mask(~self.mask())

    def __and__(self, other):
        N = min(self.horizon, other.horizon)
        return NatSubset.from_mask(self.mask(N) & other.mask(N))

    def __or__(self, other):
        N = min(self.horizon, other.horizon)
        return NatSubset.from_mask(self.mask(N) | other.mask(N))


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    counts: np.ndarray  # counts[n-1] = card(A ∩ [1, n])
    window_start: int
    upper_at_tail: float
    lower_at_tail: float
    upper_witness: int
    lower_witness: int

    @property
    def horizon(self):
        return int(self.counts.size)

    @property
    def ratios(self):
        return self.counts / np.arange(1, self.counts.size + 1)

    def ratio(self, n):
        """Exact ``card(A ∩ [1, n]) / n``."""
        return Fraction(int(self.counts[n - 1]), n)

    def to_json(self):
        return {"horizon": self.horizon, "window_start": self.window_start,
                "upper_at_tail": self.upper_at_tail, "lower_at_tail": self.lower_at_tail,
                "upper_witness": self.upper_witness, "lower_witness": self.lower_witness}


def default_window_start(N):
    return max(1, math.ceil(N / 2))


def profile_mask(mask, N0=None):
    """Density profile of the set whose indicator on ``[1, N]`` is ``mask``."""
    mask = np.asarray(mask, dtype=bool)
    N = mask.size
    if N < 1:
        raise DensityConfigError("horizon must be >= 1")
    N0 = default_window_start(N) if N0 is None else int(N0)
    if not 1 <= N0 <= N:
        raise DensityConfigError(f"empty tail window [{N0}, {N}]")
    counts = np.cumsum(mask, dtype=np.int64)
    n = np.arange(N0, N + 1)
    r = counts[N0 - 1:] / n
    # argmax/argmin on exact cross-multiplied counts would be slower and the
    # float quotients of integers below 2**53 are already correctly ordered
    hi = int(np.argmax(r))
    lo = int(np.argmin(r))
    return DensityEstimate(counts, N0, float(r[hi]), float(r[lo]), int(n[hi]), int(n[lo]))


def density_profile(A: NatSubset, N=None, N0=None) -> DensityEstimate:
    N = A.horizon if N is None else int(N)
    if N < 1:
        raise DensityConfigError("horizon must be >= 1")
    if N0 is not None and not 1 <= N0 <= N:
        raise DensityConfigError(f"empty tail window [{N0}, {N}]")
    return profile_mask(A.mask(N), N0)


def default_eps_schedule(N, margin=0.1):
    """``2^-k`` for ``k = 1 .. floor(log2(margin * N))`` (at least one level)."""
    kmax = max(1, int(math.floor(math.log2(max(2.0, margin * N)))))
    return [2.0 ** -k for k in range(1, kmax + 1)]


@dataclass(frozen=True, eq=False)
class DensityOneResult:
    subset: NatSubset
    flag: Status
    levels: list = field(default_factory=list)  # (eps, DensityEstimate)
    breakpoints: list = field(default_factory=list)
    estimate: DensityEstimate = None

    def to_json(self):
        return {"flag": self.flag.value,
                "levels": [{"eps": e, **d.to_json()} for e, d in self.levels],
                "breakpoints": self.breakpoints,
                "subset_density": self.estimate.to_json() if self.estimate else None}


def extract_density_one_subset(a, eps_schedule=None, margin=0.1, N0=None) -> DensityOneResult:
    """Union construction of a density-one set along which ``|a_n| -> 0``.

    Each level set ``L_k = {n : |a_n| < eps_k}`` is profiled.  If one of them
    has tail upper density below ``1 - margin`` the convergence is refuted.
    Otherwise ``A`` consists of ``[1, n_1]`` followed by ``L_k ∩ (n_k, n_{k+1}]``,
    where ``n_{k+1}`` is the first ``n >= 2 n_k`` at which ``L_{k+1}`` already
    fills a ``1 - margin`` fraction of ``[1, n]``.  The flag is certified when
    ``A`` itself has tail upper density ``>= 1 - margin``.
    """
    a = np.abs(np.asarray(a))
    N = a.size
    if N < 1:
        raise DensityConfigError("empty series")
    eps = default_eps_schedule(N, margin) if eps_schedule is None else list(eps_schedule)
    if any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])) or any(e <= 0 for e in eps):
        raise DensityConfigError("eps schedule must be positive and strictly decreasing")
    levels = []
    masks = []
    for e in eps:
        m = a < e
        masks.append(m)
        levels.append((e, profile_mask(m, N0)))
    if any(d.upper_at_tail < 1 - margin for _, d in levels):
        return DensityOneResult(NatSubset.from_mask(np.zeros(N, bool)), Status.REFUTED, levels)

    out = np.zeros(N, bool)
    n_prev = 0
    cur = None
    breaks = []
    for k, m in enumerate(masks):
        r = levels[k][1].ratios
        lo = max(1, 2 * n_prev)
        hits = np.flatnonzero(r[lo - 1:] >= 1 - margin)
        if hits.size == 0:
            break
        n_k = lo + int(hits[0])
        if cur is None:
            out[:n_k] = True
        else:
            out[n_prev:n_k] = cur[n_prev:n_k]
        breaks.append(n_k)
        cur, n_prev = m, n_k
    if cur is None:
        return DensityOneResult(NatSubset.from_mask(out), Status.UNDECIDED, levels)
    out[n_prev:] = cur[n_prev:]
    est = profile_mask(out, N0)
    flag = Status.CERTIFIED if est.upper_at_tail >= 1 - margin else Status.UNDECIDED
    return DensityOneResult(NatSubset.from_mask(out), flag, levels, breaks, est)
