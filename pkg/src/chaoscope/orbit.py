"""Orbit statistics: the distance series ``s_n = d(T^n x, 0)``, its Cesàro
means and separation counts.

Sequence-space traces are computed in the ``log2`` domain from the closed-form
orbit, so magnitudes far outside the float range are tracked exactly and only
saturate to ``+inf`` when converted to ``s_n``.  Torus traces use exact
integer arithmetic.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .operators import (DirectSum, DirectSumVector, WeightedShift, as_torus_matrix, is_torus,
                        iterate_table, linear_form, torus_precision_bits, _mat_vec_mod)
from .spaces import (IncompatibleSpaces, LazyTorusPoint, LazyVector, MetricSpec, TorusPoint,
                     default_metric, frechet_from_pj_log2)

DEFAULT_DELTAS = tuple(2.0 ** k for k in range(-10, 4))
GUARD = 64

# Callables run on every trace; tests register invariant checks here.
_TRACE_HOOKS = []


@dataclass(frozen=True, eq=False)
class OrbitTrace:
    s: np.ndarray          # s[n-1] = s_n
    cesaro: np.ndarray     # A_n
    deltas: tuple
    sep_counts: np.ndarray  # sep_counts[i, n-1] = card{k <= n : s_k > deltas[i]}
    metric: MetricSpec
    N: int
    s_log2: np.ndarray = None
    exact_nums: tuple = None  # torus: s_n = exact_nums[n-1] / exact_den
    exact_den: int = None

    def exact(self, n):
        if self.exact_nums is None:
            raise ValueError("trace has no exact representation")
        return Fraction(self.exact_nums[n - 1], self.exact_den)

    def tail(self, N0):
        return self.s[N0 - 1:]

    def count(self, delta, n):
        i = self.deltas.index(delta)
        return int(self.sep_counts[i, n - 1])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "s_n", "A_n"] + [f"c_{d!r}" for d in self.deltas])
        for n in range(1, self.N + 1):
            w.writerow([n, repr(float(self.s[n - 1])), repr(float(self.cesaro[n - 1]))]
                       + [int(c) for c in self.sep_counts[:, n - 1]])
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def make_trace(s, metric, deltas=DEFAULT_DELTAS, s_log2=None, exact_nums=None, exact_den=None):
    s = np.ascontiguousarray(s, dtype=np.float64)
    deltas = tuple(float(d) for d in deltas)
    A = _kernels.cesaro(s)
    counts = np.cumsum(s[None, :] > np.asarray(deltas)[:, None], axis=1, dtype=np.int64)
    tr = OrbitTrace(s, A, deltas, counts, metric, int(s.size), s_log2, exact_nums, exact_den)
    for hook in _TRACE_HOOKS:
        hook(tr)
    return tr


# -------------------------------------------------------- sequence series --

def _log2_to_linear(lg):
    with np.errstate(over="ignore"):
        return np.exp2(lg)


def sequence_rows(T, c, N, J):
    """``(N, J)`` array of ``log2|(T^n x)_j|`` for ``n = 1..N``, ``j = 1..J``."""
    scale, base = linear_form(T)
    if scale == 0 or c.is_zero:
        return np.full((N, J), -math.inf)
    la = c.log2abs()
    if isinstance(base, WeightedShift):
        lam, zc = base.weights.log_prefix(int(c.idx[-1]))
        out = _kernels.shift_window_log(c.idx, la, lam, zc, N, J)
    else:
        d = np.abs(base.diagonal.array(int(c.idx[-1]))[c.idx])
        dz = d == 0
        with np.errstate(divide="ignore"):
            ld = np.where(dz, 0.0, np.log2(np.where(dz, 1.0, d)))
        out = _kernels.diag_window_log(c.idx, la, ld, dz, N, J)
    if abs(scale) != 1.0:
        out = out + math.log2(abs(scale)) * np.arange(1, N + 1)[:, None]
    return out


def sequence_norms_log2(T, c, N, p):
    """``log2 ||T^n x||_p`` for ``n = 1..N`` from materialized coordinates."""
    scale, base = linear_form(T)
    if scale == 0 or c.is_zero:
        return np.full(N, -math.inf)
    la = c.log2abs()
    if isinstance(base, WeightedShift):
        lam, zc = base.weights.log_prefix(int(c.idx[-1]))
        out = _kernels.shift_norm_log(c.idx, la, lam, zc, N, p)
    else:
        d = np.abs(base.diagonal.array(int(c.idx[-1]))[c.idx])
        dz = d == 0
        with np.errstate(divide="ignore"):
            ld = np.where(dz, 0.0, np.log2(np.where(dz, 1.0, d)))
        out = _kernels.diag_norm_log(la, ld, dz, N, p)
    if abs(scale) != 1.0:
        out = out + math.log2(abs(scale)) * np.arange(1, N + 1)
    return out


def metric_from_rows(m: MetricSpec, rows_log2):
    """Combine per-coordinate ``log2`` magnitudes into the metric's ``log2`` distance."""
    pj = m.family.evaluate_all_log2(rows_log2)
    if m.kind == "seminorm":
        return pj[:, -1]
    return frechet_from_pj_log2(pj)


def _materialize_for(T, x, N):
    if x.is_finite:
        return x.materialize(x.last_index)
    return x.materialize(N + GUARD)


def _series_parts(T, x, m, N):
    """``(lg, offset)`` with ``log2 d(T^n x, 0) = lg[n-1] + offset``.

    For norms the largest binary exponent of ``x`` is factored out first, so
    scaling ``x`` by a power of two changes only the integer offset and the
    linear series scales exactly.
    """
    m.check(x.space)
    c = _materialize_for(T, x, N)
    if m.kind in ("banach", "bounded"):
        off = int(c.exp.max()) if c.size else 0
        shifted = type(c)(c.idx, c.coef, c.exp - off)
        lg = sequence_norms_log2(T, shifted, N, m.p)
        if m.kind == "bounded":
            return np.minimum(lg + off, 0.0), 0
        return lg, off
    return metric_from_rows(m, sequence_rows(T, c, N, m.family.J_max)), 0


def series_log2(T, x: LazyVector, m: MetricSpec, N):
    """``log2 d(T^n x, 0)`` for ``n = 1..N`` on a sequence space."""
    lg, off = _series_parts(T, x, m, N)
    return lg + off if off else lg


# ------------------------------------------------------------ torus series --

def _torus_point(T, x, N):
    if isinstance(x, LazyTorusPoint):
        return x.at_precision(torus_precision_bits(T, N))
    return x


def torus_series(T, x: TorusPoint, N):
    """Exact numerators of ``d(T^n x, 0)`` over the common denominator."""
    A = as_torus_matrix(T).matrix
    q = x.den
    v = x.nums
    nums = []
    for _ in range(N):
        v = _mat_vec_mod(A, v, q)
        nums.append(max(min(a, q - a) for a in v))
    return nums, q


def _fraction_floats(nums, den):
    # exact num/den rounded once; Python ints of any size divide correctly
    return np.array([n / den for n in nums], dtype=np.float64)


# -------------------------------------------------------------- direct sum --

def _direct_sum_series(T, x, m, N):
    if not isinstance(x, DirectSumVector) or len(x.components) != len(T.parts):
        raise IncompatibleSpaces("direct sum operator needs a matching DirectSumVector")
    parts = []
    for P, c in zip(T.parts, x.components):
        mm = m if not isinstance(m, (list, tuple)) else m[len(parts)]
        if is_torus(P):
            nums, den = torus_series(P, _torus_point(P, c, N), N)
            with np.errstate(divide="ignore"):
                parts.append(np.log2(_fraction_floats(nums, den)))
        else:
            parts.append(series_log2(P, c, mm, N))
    stack = np.vstack(parts)
    mk = m if isinstance(m, MetricSpec) else None
    if mk is not None and mk.kind == "banach" and not math.isinf(mk.p):
        with np.errstate(invalid="ignore"):
            return np.logaddexp2.reduce(mk.p * stack, axis=0) / mk.p
    return stack.max(axis=0)


# ------------------------------------------------------------------ public --

def trace(T, x, m=None, N=1024, deltas=DEFAULT_DELTAS) -> OrbitTrace:
    """Trace of ``s_n = d(T^n x, 0)`` for ``n = 1..N``."""
    if N < 2:
        raise ValueError("horizon must be >= 2")
    if isinstance(T, DirectSum):
        lg = _direct_sum_series(T, x, m or default_metric(x.components[0].space), N)
        return make_trace(_log2_to_linear(lg), m, deltas, s_log2=lg)
    if is_torus(T):
        if not isinstance(x, (TorusPoint, LazyTorusPoint)):
            raise IncompatibleSpaces("torus operator needs a torus point")
        m = m or MetricSpec.torus()
        if m.kind != "torus":
            raise IncompatibleSpaces(f"metric {m.kind} on a torus")
        nums, den = torus_series(T, _torus_point(T, x, N), N)
        return make_trace(_fraction_floats(nums, den), m, deltas,
                          exact_nums=tuple(nums), exact_den=den)
    if not isinstance(x, LazyVector) or x.space != T.space:
        raise IncompatibleSpaces(f"operator on {T.space} applied to {type(x).__name__}")
    m = m or default_metric(x.space)
    lg, off = _series_parts(T, x, m, N)
    with np.errstate(over="ignore"):
        s = np.ldexp(np.exp2(lg), off)
    return make_trace(s, m, deltas, s_log2=lg + off if off else lg)


def _direct_pair_log2(T, x, y, m, N):
    """``log2 d(T^n x, T^n y)`` from two separately iterated orbits."""
    m.check(x.space)
    cx, cy = _materialize_for(T, x, N), _materialize_for(T, y, N)
    idx = np.union1d(cx.idx, cy.idx)
    dtype = np.result_type(cx.coef.dtype, cy.coef.dtype)

    def aligned(c):
        coef = np.zeros(idx.size, dtype)
        ex = np.zeros(idx.size, np.int64)
        pos = np.searchsorted(idx, c.idx)
        coef[pos] = c.coef
        ex[pos] = c.exp
        return type(c)(idx, coef, ex)

    ax, ay = aligned(cx), aligned(cy)
    if ax.is_zero:
        return np.full(N, -math.inf)
    xc, xe = iterate_table(T, ax, N)
    yc, ye = iterate_table(T, ay, N)
    emax = np.maximum(xe, ye)
    diff = xc * np.ldexp(1.0, xe - emax) - yc * np.ldexp(1.0, ye - emax)
    with np.errstate(divide="ignore"):
        lg = np.log2(np.abs(diff)) + emax
    _, base = linear_form(T)
    n = np.arange(1, N + 1)[:, None]
    pos = idx[None, :] - n if isinstance(base, WeightedShift) else np.broadcast_to(idx, lg.shape)
    lg = np.where(pos >= 1, lg, -math.inf)
    if m.kind in ("banach", "bounded"):
        mx = lg.max(axis=1)
        if math.isinf(m.p):
            out = mx
        else:
            safe = np.where(np.isfinite(mx), mx, 0.0)
            with np.errstate(invalid="ignore"):
                acc = np.exp2(m.p * (lg - safe[:, None])).sum(axis=1)
            with np.errstate(divide="ignore"):
                out = np.where(np.isfinite(mx), safe + np.log2(acc) / m.p, -math.inf)
        return np.minimum(out, 0.0) if m.kind == "bounded" else out
    J = m.family.J_max
    rows = np.full((N, J), -math.inf)
    r, k = np.nonzero((pos >= 1) & (pos <= J) & np.isfinite(lg))
    rows[r, pos[r, k] - 1] = lg[r, k]
    return metric_from_rows(m, rows)


def pair_trace(T, x, y, m=None, N=1024, deltas=DEFAULT_DELTAS, reduce=True) -> OrbitTrace:
    """Trace of ``d(T^n x, T^n y)``.

    With a translation-invariant metric and ``reduce=True`` this is
    ``trace(T, y - x)``.  ``reduce=False`` iterates both orbits and measures
    their distance at every step.
    """
    if isinstance(x, LazyTorusPoint) or isinstance(y, LazyTorusPoint):
        x, y = _torus_point(T, x, N), _torus_point(T, y, N)
    if reduce and (m is None or m.translation_invariant):
        return trace(T, y - x, m, N, deltas)
    if is_torus(T):
        A = as_torus_matrix(T).matrix
        m = m or MetricSpec.torus()
        z = x - y  # common denominator
        q = z.den
        u = tuple(a * (q // x.den) % q for a in x.nums)
        v = tuple(a * (q // y.den) % q for a in y.nums)
        nums = []
        for _ in range(N):
            u, v = _mat_vec_mod(A, u, q), _mat_vec_mod(A, v, q)
            nums.append(max(min((a - b) % q, q - (a - b) % q) for a, b in zip(u, v)))
        return make_trace(_fraction_floats(nums, q), m, deltas, exact_nums=tuple(nums), exact_den=q)
    m = m or default_metric(x.space)
    lg = _direct_pair_log2(T, x, y, m, N)
    return make_trace(_log2_to_linear(lg), m, deltas, s_log2=lg)
