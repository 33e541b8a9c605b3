"""Operator zoo: weighted backward shifts, diagonals, scalar multiples, direct
sums, integer matrices on tori, identity and zero.

Two independent routes to ``T^n x`` are provided: step-by-step iteration
(:func:`apply`, :func:`iterate_table`) and closed forms (:func:`orbit_oracle`,
:func:`orbit_table`).  For a weighted shift the closed form is
``(B_w^n x)_k = (w_k ... w_{k+n-1}) x_{k+n}``; on the torus it is
``frac(A^n x)``.
"""
from __future__ import annotations

import cmath
import functools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .spaces import (L2, Coords, IncompatibleSpaces, LazyTorusPoint, LazyVector, Space,
                     SpecError, TorusPoint, parse_space)


class UnsupportedOracle(NotImplementedError):
    pass


# ----------------------------------------------------------- weight rules --

@dataclass(frozen=True)
class WeightRule:
    """Index function ``i -> w_i`` (1-based)."""

    kind: str  # constant | periodic | ramp | table
    values: tuple = ()
    default: complex | float = 0.0

    @classmethod
    def constant(cls, value):
        return cls("constant", (value,))

    @classmethod
    def periodic(cls, values):
        if not values:
            raise SpecError("weights.values", "periodic rule needs at least one value")
        return cls("periodic", tuple(values))

    @classmethod
    def ramp(cls, start, stop, length):
        if int(length) < 1:
            raise SpecError("weights.length", "ramp length must be >= 1")
        return cls("ramp", (start, stop, int(length)))

    @classmethod
    def table(cls, values, default=0.0):
        return cls("table", tuple(values), default)

    @property
    def is_complex(self):
        return any(isinstance(v, complex) for v in self.values + (self.default,))

    def array(self, n):
        """``w[0..n]`` with ``w[i] = w_i``; ``w[0]`` is unused."""
        return _weight_array(self, _round_up(n))[: n + 1]

    def log_prefix(self, n):
        """``(lam, zc)`` for indices ``0..n``; see :mod:`chaoscope._kernels`."""
        lam, zc = _weight_logs(self, _round_up(n))
        return lam[: n + 1], zc[: n + 1]

    def sup(self, upto):
        return float(np.abs(self.array(upto)[1:]).max()) if upto >= 1 else 0.0

    def growth_log2(self, lo=1, hi=4096):
        """Mean ``log2|w_i|`` over ``[lo, hi]``: the per-step growth rate."""
        w = np.abs(self.array(hi)[lo:])
        if (w == 0).any():
            return -math.inf
        return float(np.log2(w).mean())

    def to_json(self):
        def enc(v):
            return [v.real, v.imag] if isinstance(v, complex) else v

        if self.kind == "constant":
            return {"kind": "constant", "value": enc(self.values[0])}
        if self.kind == "periodic":
            return {"kind": "periodic", "values": [enc(v) for v in self.values]}
        if self.kind == "ramp":
            a, b, L = self.values
            return {"kind": "ramp", "start": enc(a), "stop": enc(b), "length": L}
        return {"kind": "table", "values": [enc(v) for v in self.values], "default": enc(self.default)}


def _round_up(n):
    return 1 << max(6, int(n).bit_length())


@functools.lru_cache(maxsize=128)
def _weight_array(rule, n):
    dtype = np.complex128 if rule.is_complex else np.float64
    i = np.arange(n + 1)
    if rule.kind == "constant":
        w = np.full(n + 1, rule.values[0], dtype=dtype)
    elif rule.kind == "periodic":
        vals = np.array(rule.values, dtype=dtype)
        w = vals[(i - 1) % len(vals)]
    elif rule.kind == "ramp":
        a, b, L = rule.values
        t = np.minimum(np.maximum(i - 1, 0), L) / L
        w = (a + (b - a) * t).astype(dtype)
    elif rule.kind == "table":
        w = np.full(n + 1, rule.default, dtype=dtype)
        vals = np.array(rule.values, dtype=dtype)
        m = min(len(vals), n)
        w[1:m + 1] = vals[:m]
    else:
        raise SpecError("weights.kind", f"unknown weight rule {rule.kind!r}")
    w[0] = 0
    w.setflags(write=False)
    return w


@functools.lru_cache(maxsize=128)
def _weight_logs(rule, n):
    w = np.abs(_weight_array(rule, n))
    wi = w[1:]
    zero = wi == 0
    with np.errstate(divide="ignore"):
        lw = np.where(zero, 0.0, np.log2(np.where(zero, 1.0, wi)))
    lam = np.zeros(n + 1)
    lam[2:] = np.cumsum(lw)[:-1]
    zc = np.zeros(n + 1, np.int64)
    zc[2:] = np.cumsum(zero)[:-1]
    lam.setflags(write=False)
    zc.setflags(write=False)
    return lam, zc


def _phase_prefix(rule, n):
    """Prefix sums of ``arg w_i`` (complex) or negative-sign counts (real)."""
    w = rule.array(n)[1:]
    out = np.zeros(n + 1)
    if rule.is_complex:
        out[2:] = np.cumsum(np.angle(w))[:-1]
    else:
        out[2:] = np.cumsum(w.real < 0)[:-1]
    return out


def parse_weights(spec, fld="weights"):
    if isinstance(spec, (int, float)):
        return WeightRule.constant(float(spec))
    if not isinstance(spec, dict):
        raise SpecError(fld, "expected a weight rule object")
    kind = spec.get("kind")

    def num(v):
        if isinstance(v, (list, tuple)):
            return complex(float(v[0]), float(v[1]))
        if isinstance(v, (int, float)):
            return float(v)
        raise SpecError(fld, f"bad weight value {v!r}")

    try:
        if kind == "constant":
            return WeightRule.constant(num(spec["value"]))
        if kind == "periodic":
            return WeightRule.periodic([num(v) for v in spec["values"]])
        if kind == "ramp":
            return WeightRule.ramp(num(spec["start"]), num(spec["stop"]), spec["length"])
        if kind == "table":
            return WeightRule.table([num(v) for v in spec["values"]], num(spec.get("default", 0.0)))
    except KeyError as exc:
        raise SpecError(f"{fld}.{exc.args[0]}", "missing key") from exc
    raise SpecError(f"{fld}.kind", f"unknown weight rule {kind!r}")


# -------------------------------------------------------------- operators --

@dataclass(frozen=True)
class WeightedShift:
    weights: WeightRule
    space: Space = L2
    kind = "weighted_backward_shift"

    def to_json(self):
        return {"kind": self.kind, "weights": self.weights.to_json(), "space": self.space.to_json()}


@dataclass(frozen=True)
class Diagonal:
    diagonal: WeightRule
    space: Space = L2
    kind = "diagonal"

    def to_json(self):
        return {"kind": self.kind, "diagonal": self.diagonal.to_json(), "space": self.space.to_json()}


@dataclass(frozen=True)
class Identity:
    space: Space = L2
    kind = "identity"

    def to_json(self):
        return {"kind": self.kind, "space": self.space.to_json()}


@dataclass(frozen=True)
class Zero:
    space: Space = L2
    kind = "zero"

    def to_json(self):
        return {"kind": self.kind, "space": self.space.to_json()}


@dataclass(frozen=True)
class ScalarMultiple:
    lam: complex | float
    inner: object
    kind = "scalar_multiple"

    @property
    def space(self):
        return self.inner.space

    def to_json(self):
        lam = [self.lam.real, self.lam.imag] if isinstance(self.lam, complex) else self.lam
        return {"kind": self.kind, "lambda": lam, "inner": self.inner.to_json()}


@dataclass(frozen=True)
class DirectSum:
    parts: tuple
    kind = "direct_sum"

    @property
    def space(self):
        return tuple(p.space for p in self.parts)

    def to_json(self):
        return {"kind": self.kind, "parts": [p.to_json() for p in self.parts]}


@dataclass(frozen=True)
class TorusMatrix:
    matrix: tuple  # tuple of integer row tuples
    kind = "torus_matrix"

    def __post_init__(self):
        rows = tuple(tuple(int(a) for a in r) for r in self.matrix)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise SpecError("matrix", "torus matrix must be square and non-empty")
        object.__setattr__(self, "matrix", rows)

    @property
    def dim(self):
        return len(self.matrix)

    @property
    def space(self):
        return Space.torus(self.dim)

    @property
    def growth_log2(self):
        """log2 of the max absolute row sum (bits of precision consumed per step)."""
        return math.log2(max(1, max(sum(abs(a) for a in r) for r in self.matrix)))

    def to_json(self):
        return {"kind": self.kind, "matrix": [list(r) for r in self.matrix]}


@dataclass(frozen=True)
class DirectSumVector:
    components: tuple

    def __add__(self, other):
        return DirectSumVector(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        return DirectSumVector(tuple(a - b for a, b in zip(self.components, other.components)))

    def __mul__(self, alpha):
        return DirectSumVector(tuple(alpha * a for a in self.components))

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    @property
    def space(self):
        return tuple(c.space for c in self.components)

    def to_json(self):
        return {"kind": "direct_sum", "components": [c.to_json() for c in self.components]}


def linear_form(T):
    """Reduce a sequence-space operator to ``(scale, base)``.

    ``base`` is a :class:`WeightedShift` or :class:`Diagonal`; ``scale == 0``
    encodes the zero operator.
    """
    scale = 1.0
    while isinstance(T, ScalarMultiple):
        scale = scale * T.lam
        T = T.inner
    if isinstance(T, (WeightedShift, Diagonal)):
        return scale, T
    if isinstance(T, Identity):
        return scale, Diagonal(WeightRule.constant(1.0), T.space)
    if isinstance(T, Zero):
        return 0.0, Diagonal(WeightRule.constant(1.0), T.space)
    raise UnsupportedOracle(f"no linear normal form for {type(T).__name__}")


def is_torus(T):
    return isinstance(T, TorusMatrix) or (isinstance(T, (Identity, Zero)) and T.space.kind == "torus")


def as_torus_matrix(T):
    if isinstance(T, TorusMatrix):
        return T
    if isinstance(T, Identity):
        k = T.space.dim
        return TorusMatrix(tuple(tuple(int(i == j) for j in range(k)) for i in range(k)))
    if isinstance(T, Zero):
        k = T.space.dim
        return TorusMatrix(tuple((0,) * k for _ in range(k)))
    if isinstance(T, ScalarMultiple) and float(T.lam).is_integer():
        A = as_torus_matrix(T.inner)
        c = int(T.lam)
        return TorusMatrix(tuple(tuple(c * a for a in r) for r in A.matrix))
    raise UnsupportedOracle(f"{type(T).__name__} is not a torus endomorphism")


def _check_space(T, x):
    if isinstance(T, DirectSum):
        if not isinstance(x, DirectSumVector) or len(x.components) != len(T.parts):
            raise IncompatibleSpaces("direct sum operator needs a matching DirectSumVector")
        return
    if isinstance(T.space, tuple):
        raise UnsupportedOracle("scale the parts of a direct sum individually")
    if is_torus(T) or (isinstance(T, ScalarMultiple) and T.space.kind == "torus"):
        if not isinstance(x, (TorusPoint, LazyTorusPoint)) or x.dim != T.space.dim:
            raise IncompatibleSpaces(f"operator on {T.space} applied to {type(x).__name__}")
        return
    if not isinstance(x, LazyVector) or x.space != T.space:
        got = getattr(x, "space", type(x).__name__)
        raise IncompatibleSpaces(f"operator on {T.space} applied to vector in {got}")


# ------------------------------------------------------------ torus maths --

def _mat_vec_mod(A, v, q):
    return tuple(sum(a * b for a, b in zip(row, v)) % q for row in A)


def _mat_mul_mod(A, B, q):
    k = len(A)
    return tuple(tuple(sum(A[i][t] * B[t][j] for t in range(k)) % q for j in range(k))
                 for i in range(k))


def _mat_pow_mod(A, n, q):
    k = len(A)
    R = tuple(tuple(int(i == j) for j in range(k)) for i in range(k))
    P = tuple(tuple(a % q for a in r) for r in A)
    while n:
        if n & 1:
            R = _mat_mul_mod(R, P, q)
        P = _mat_mul_mod(P, P, q)
        n >>= 1
    return R


def torus_precision_bits(T, horizon, guard=64):
    return int(math.ceil(horizon * as_torus_matrix(T).growth_log2)) + guard


# ------------------------------------------------------- sequence maths --

def step_coords(T, c: Coords) -> Coords:
    """One application of ``T`` to materialized coordinates."""
    scale, base = linear_form(T)
    if scale == 0 or c.is_zero:
        return Coords.empty(c.coef.dtype)
    if isinstance(base, WeightedShift):
        keep = c.idx > 1
        idx = c.idx[keep] - 1
        w = base.weights.array(int(c.idx[-1]))
        coef = c.coef[keep] * w[idx] * scale
        out = Coords(idx, coef, c.exp[keep].copy())
    else:
        d = base.diagonal.array(int(c.idx[-1]))
        out = Coords(c.idx.copy(), c.coef * d[c.idx] * scale, c.exp.copy())
    return Coords.from_parts([Coords(out.idx, *_renorm_pair(out.coef, out.exp))])


def _renorm_pair(coef, ex):
    mag = np.abs(coef)
    _, sh = np.frexp(mag)
    sh = np.where(mag > 0, sh, 0).astype(np.int64)
    return coef * np.ldexp(1.0, -sh), ex + sh


def _oracle_factor(base, scale, s_idx, n):
    """Closed-form ``log2|factor|``, phase multiplier and alive mask for ``T^n``."""
    if isinstance(base, WeightedShift):
        top = int(s_idx.max()) if s_idx.size else 1
        lam, zc = base.weights.log_prefix(top)
        j = s_idx - n
        alive = j >= 1
        jc = np.where(alive, j, 0)
        alive &= (zc[s_idx] - zc[jc]) == 0
        lg = lam[s_idx] - lam[jc]
        ph = _phase_prefix(base.weights, top)
        if base.weights.is_complex:
            phase = np.exp(1j * (ph[s_idx] - ph[jc]))
        else:
            phase = np.where((ph[s_idx] - ph[jc]) % 2 == 1, -1.0, 1.0)
    else:
        top = int(s_idx.max()) if s_idx.size else 1
        d = base.diagonal.array(top)[s_idx]
        alive = d != 0
        with np.errstate(divide="ignore"):
            lg = n * np.log2(np.where(alive, np.abs(d), 1.0))
        if base.diagonal.is_complex:
            phase = np.exp(1j * n * np.angle(d))
        else:
            phase = np.where((d.real < 0) & (n % 2 == 1), -1.0, 1.0)
    if scale != 1.0:
        lg = lg + n * math.log2(abs(scale))
        if isinstance(scale, complex):
            phase = phase * cmath.exp(1j * n * cmath.phase(scale))
        elif scale < 0:
            phase = np.where(np.asarray(n) % 2 == 1, -phase, phase)
    return lg, phase, alive


def oracle_coords(T, c: Coords, n: int) -> Coords:
    """Closed form ``T^n`` applied to materialized coordinates."""
    if n == 0:
        return c
    scale, base = linear_form(T)
    if scale == 0 or c.is_zero:
        return Coords.empty(c.coef.dtype)
    lg, phase, alive = _oracle_factor(base, scale, c.idx, n)
    e_add = np.floor(lg)
    coef = c.coef * phase * np.exp2(lg - e_add)
    idx = c.idx - n if isinstance(base, WeightedShift) else c.idx
    out = Coords(idx[alive], coef[alive], c.exp[alive] + e_add[alive].astype(np.int64))
    return Coords.from_parts([Coords(out.idx, *_renorm_pair(out.coef, out.exp))])


def reach(T, n):
    """How many indices beyond ``J`` the first ``J`` coordinates of ``T^n x`` read."""
    if isinstance(T, DirectSum):
        return max(reach(p, n) for p in T.parts)
    _, base = linear_form(T)
    return n if isinstance(base, WeightedShift) else 0


@dataclass(frozen=True)
class ImageSupport:
    """Lazy support of ``T^n x`` for an infinitely supported ``x``."""

    op: object
    power: int
    base: LazyVector

    @property
    def last_index(self):
        li = self.base.last_index
        if li is None:
            return None
        return max(0, li - reach(self.op, self.power))

    def materialize(self, max_index):
        src = self.base.materialize(max_index + reach(self.op, self.power))
        return oracle_coords(self.op, src, self.power).truncate(max_index)

    def tail_log2(self, J, p):
        # crude but safe for shifts: the image tail is the source tail amplified
        scale, base = linear_form(self.op)
        if scale == 0:
            return -math.inf
        top = J + reach(self.op, self.power) + 1
        arr = np.abs((base.weights if isinstance(base, WeightedShift) else base.diagonal).array(top))
        g = self.power * (math.log2(max(arr[1:].max(), 1e-300)) + math.log2(abs(scale)))
        return self.base.tail_log2(J + reach(self.op, self.power)) + g

    def to_json(self):
        return {"kind": "image", "power": self.power, "operator": self.op.to_json(),
                "vector": self.base.to_json()}


# ------------------------------------------------------------- public API --

def apply(T, x):
    """``T x`` by direct one-step application."""
    _check_space(T, x)
    if isinstance(T, DirectSum):
        return DirectSumVector(tuple(apply(p, c) for p, c in zip(T.parts, x.components)))
    if isinstance(x, LazyTorusPoint):
        raise UnsupportedOracle("materialize a lazy torus point with at_precision() first")
    if isinstance(x, TorusPoint):
        A = as_torus_matrix(T)
        return TorusPoint(_mat_vec_mod(A.matrix, x.nums, x.den), x.den)
    if x.is_finite:
        return LazyVector.from_coords(step_coords(T, x.materialize(x.last_index)), x.space)
    return LazyVector(x.space, ((1.0, ImageSupport(T, 1, x)),))


def iterate(T, x, n):
    for _ in range(n):
        x = apply(T, x)
    return x


def orbit_oracle(T, x, n, precision=None):
    """``T^n x`` from the closed form, without iterating."""
    if n < 0:
        raise ValueError("n must be >= 0")
    _check_space(T, x)
    if isinstance(T, DirectSum):
        return DirectSumVector(tuple(orbit_oracle(p, c, n) for p, c in zip(T.parts, x.components)))
    if isinstance(x, LazyTorusPoint):
        x = x.at_precision(precision or torus_precision_bits(T, n))
    if isinstance(x, TorusPoint):
        A = as_torus_matrix(T)
        return TorusPoint(_mat_vec_mod(_mat_pow_mod(A.matrix, n, x.den), x.nums, x.den), x.den)
    linear_form(T)
    if n == 0:
        return x
    if x.is_finite:
        return LazyVector.from_coords(oracle_coords(T, x.materialize(x.last_index), n), x.space)
    return LazyVector(x.space, ((1.0, ImageSupport(T, n, x)),))


def _effective_weights(T, top):
    scale, base = linear_form(T)
    rule = base.weights if isinstance(base, WeightedShift) else base.diagonal
    w = rule.array(top)
    if scale != 1.0:
        w = w * scale
    return base, w


def iterate_table(T, c: Coords, nsteps):
    """Iterated application, recorded per step: ``(coef, exp)`` arrays of shape
    ``(nsteps, support)`` where column ``k`` follows original coordinate ``idx[k]``."""
    base, w = _effective_weights(T, int(c.idx[-1]) if c.size else 1)
    dtype = np.result_type(c.coef.dtype, w.dtype)
    coef = c.coef.astype(dtype)
    if isinstance(base, WeightedShift):
        return _kernels.shift_iterate(c.idx, coef, c.exp.copy(), w.astype(dtype), nsteps)
    return _kernels.diag_iterate(coef, c.exp.copy(), w[c.idx].astype(dtype), nsteps)


def orbit_table(T, c: Coords, nsteps):
    """Closed-form counterpart of :func:`iterate_table`."""
    scale, base = linear_form(T)
    S = c.size
    dtype = np.result_type(c.coef.dtype, np.complex128 if isinstance(scale, complex) else np.float64)
    rule = base.weights if isinstance(base, WeightedShift) else base.diagonal
    if rule.is_complex:
        dtype = np.complex128
    oc = np.zeros((nsteps, S), dtype)
    oe = np.zeros((nsteps, S), np.int64)
    if scale == 0 or S == 0:
        return oc, oe
    chunk = max(1, (1 << 20) // max(S, 1))
    for lo in range(1, nsteps + 1, chunk):
        hi = min(nsteps, lo + chunk - 1)
        n = np.arange(lo, hi + 1, dtype=np.int64)[:, None]
        lg, phase, alive = _oracle_factor(base, scale, c.idx[None, :], n)
        lg = np.broadcast_to(lg, (hi - lo + 1, S))
        alive = np.broadcast_to(alive, lg.shape)
        safe = np.where(alive, lg, 0.0)
        e_add = np.floor(safe)
        coef = np.where(alive, c.coef * phase * np.exp2(safe - e_add), 0)
        coef, ex = _renorm_pair(coef, c.exp + e_add.astype(np.int64))
        oc[lo - 1:hi] = coef
        oe[lo - 1:hi] = np.where(alive, ex, 0)
    return oc, oe


# ---------------------------------------------------------------- parsing --

def parse_operator(spec, fld="operator"):
    if isinstance(spec, str):
        return _parse_alias(spec)
    if not isinstance(spec, dict):
        raise SpecError(fld, "expected a JSON object")
    kind = spec.get("kind")
    if kind is None:
        raise SpecError(f"{fld}.kind", "missing operator kind")
    space = parse_space(spec.get("space")) if "space" in spec else None
    if kind == "weighted_backward_shift":
        if "weights" not in spec:
            raise SpecError(f"{fld}.weights", "weighted shift needs 'weights'")
        return WeightedShift(parse_weights(spec["weights"], f"{fld}.weights"), space or L2)
    if kind == "diagonal":
        if "diagonal" not in spec:
            raise SpecError(f"{fld}.diagonal", "diagonal operator needs 'diagonal'")
        return Diagonal(parse_weights(spec["diagonal"], f"{fld}.diagonal"), space or L2)
    if kind == "scalar_multiple":
        if "lambda" not in spec or "inner" not in spec:
            raise SpecError(f"{fld}.lambda", "scalar_multiple needs 'lambda' and 'inner'")
        lam = spec["lambda"]
        lam = complex(*lam) if isinstance(lam, list) else float(lam)
        inner = parse_operator(spec["inner"], f"{fld}.inner")
        if isinstance(inner, DirectSum):
            return DirectSum(tuple(ScalarMultiple(lam, p) for p in inner.parts))
        if inner.space.kind == "torus":
            return as_torus_matrix(ScalarMultiple(lam, inner))
        return ScalarMultiple(lam, inner)
    if kind == "direct_sum":
        parts = spec.get("parts")
        if not parts:
            raise SpecError(f"{fld}.parts", "direct_sum needs a non-empty 'parts' list")
        return DirectSum(tuple(parse_operator(p, f"{fld}.parts[{i}]") for i, p in enumerate(parts)))
    if kind == "torus_matrix":
        M = spec.get("matrix")
        if not M:
            raise SpecError(f"{fld}.matrix", "torus_matrix needs 'matrix'")
        for r in M:
            for a in (r if isinstance(r, list) else [r]):
                if not float(a).is_integer():
                    raise SpecError(f"{fld}.matrix", f"entries must be integers, got {a}")
        return TorusMatrix(tuple(tuple(int(a) for a in r) for r in M))
    if kind == "identity":
        return Identity(space or L2)
    if kind == "zero":
        return Zero(space or L2)
    if kind == "doubling":
        return TorusMatrix(((2,),))
    raise SpecError(f"{fld}.kind", f"unknown operator kind {kind!r}")


def _parse_alias(text):
    t = text.strip()
    if t.startswith("{"):
        return parse_operator(json.loads(t))
    if t == "doubling":
        return TorusMatrix(((2,),))
    if t == "halfB":
        return ScalarMultiple(0.5, WeightedShift(WeightRule.constant(1.0), L2))
    if t in ("I", "identity"):
        return Identity(L2)
    if t.endswith("B"):
        lam = t[:-1]
        shift = WeightedShift(WeightRule.constant(1.0), L2)
        if not lam:
            return shift
        try:
            return ScalarMultiple(float(lam), shift)
        except ValueError:
            pass
    raise SpecError("operator", f"unknown operator shorthand {text!r}")


def backward_shift(lam=1.0, space=L2):
    """``lam * B`` with the unweighted backward shift ``B``."""
    B = WeightedShift(WeightRule.constant(1.0), space)
    return B if lam == 1.0 else ScalarMultiple(lam, B)


def doubling_map():
    return TorusMatrix(((2,),))


def describe(T, window=4096):
    """Human-readable summary including the weight bound on ``[1, window]``."""
    out = {"kind": T.kind}
    if isinstance(T, WeightedShift):
        out["weight_sup"] = T.weights.sup(window)
    elif isinstance(T, Diagonal):
        out["diagonal_sup"] = T.diagonal.sup(window)
    elif isinstance(T, ScalarMultiple):
        out["lambda"] = abs(T.lam)
        out["inner"] = describe(T.inner, window)
    return out
