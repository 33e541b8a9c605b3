"""Sequence-space vectors, torus points and the metrics used on them.

Sequence vectors are stored in *scaled* form: coordinate ``x_s`` is
``coef * 2**exp`` with ``coef`` a float (or complex) and ``exp`` an integer,
so amplitudes like ``k * 2**(-k**2)`` stay representable far beyond the
double exponent range.  Torus points are exact: integer numerators over a
common denominator (a power of two for dyadic points).
"""
from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .expr import AmplitudeRule, IndexRule, mp_to_scaled


class SpecError(ValueError):
    """A malformed input description; ``field`` names the offending key."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class IncompatibleSpaces(ValueError):
    pass


# ----------------------------------------------------------------- spaces --

@dataclass(frozen=True)
class Space:
    kind: str  # "lp", "omega" or "torus"
    p: float = 2.0
    dim: int = 1

    @classmethod
    def lp(cls, p=2.0):
        p = float(p)
        if not p >= 1:
            raise SpecError("space.p", f"need p >= 1, got {p}")
        return cls("lp", p=p)

    @classmethod
    def omega(cls):
        return cls("omega", p=2.0)

    @classmethod
    def torus(cls, dim=1):
        if int(dim) < 1:
            raise SpecError("space.dim", "torus dimension must be >= 1")
        return cls("torus", dim=int(dim))

    @property
    def is_sequence(self):
        return self.kind in ("lp", "omega")

    def to_json(self):
        if self.kind == "lp":
            return {"kind": "lp", "p": "inf" if math.isinf(self.p) else self.p}
        if self.kind == "torus":
            return {"kind": "torus", "dim": self.dim}
        return {"kind": self.kind}


L2 = Space.lp(2)


def parse_space(spec):
    if spec is None:
        return L2
    if isinstance(spec, str):
        spec = {"kind": spec}
    kind = spec.get("kind")
    if kind == "lp":
        p = spec.get("p", 2)
        return Space.lp(math.inf if p in ("inf", "infinity") else p)
    if kind in ("l2", "l1", "linf"):
        return Space.lp({"l2": 2, "l1": 1, "linf": math.inf}[kind])
    if kind == "omega":
        return Space.omega()
    if kind == "torus":
        return Space.torus(spec.get("dim", 1))
    raise SpecError("space.kind", f"unknown space kind {kind!r}")


# ---------------------------------------------------------------- coords --

def _renorm(coef, ex):
    mag = np.abs(coef)
    _, sh = np.frexp(mag)
    sh = np.where(mag > 0, sh, 0).astype(np.int64)
    return coef * np.ldexp(1.0, -sh), ex + sh


@dataclass(frozen=True, eq=False)
class Coords:
    """A finitely supported, materialized sequence vector."""

    idx: np.ndarray
    coef: np.ndarray
    exp: np.ndarray

    @classmethod
    def empty(cls, dtype=np.float64):
        return cls(np.zeros(0, np.int64), np.zeros(0, dtype), np.zeros(0, np.int64))

    @classmethod
    def from_parts(cls, parts, dtype=None):
        parts = [p for p in parts if p.idx.size]
        if not parts:
            return cls.empty(dtype or np.float64)
        if dtype is None:
            dtype = np.result_type(*[p.coef.dtype for p in parts])
        idx = np.concatenate([p.idx for p in parts])
        coef = np.concatenate([p.coef for p in parts]).astype(dtype)
        ex = np.concatenate([p.exp for p in parts])
        order = np.argsort(idx, kind="stable")
        idx, coef, ex = idx[order], coef[order], ex[order]
        starts = np.flatnonzero(np.r_[True, idx[1:] != idx[:-1]])
        if starts.size == idx.size:
            keep = coef != 0
            return cls(idx[keep], coef[keep], np.where(coef[keep] != 0, ex[keep], 0))
        group = np.repeat(np.arange(starts.size), np.diff(np.r_[starts, idx.size]))
        emax = np.maximum.reduceat(ex, starts)
        scaled = coef * np.ldexp(1.0, ex - emax[group])
        total = np.add.reduceat(scaled, starts)
        c, e = _renorm(total, emax)
        keep = c != 0
        return cls(idx[starts][keep], c[keep], e[keep])

    @property
    def size(self):
        return int(self.idx.size)

    @property
    def is_zero(self):
        return self.idx.size == 0

    def log2abs(self):
        with np.errstate(divide="ignore"):
            return np.log2(np.abs(self.coef)) + self.exp

    def values(self):
        with np.errstate(over="ignore"):
            return self.coef * np.ldexp(1.0, self.exp)

    def scale(self, alpha):
        if alpha == 0 or self.is_zero:
            return Coords.empty(self.coef.dtype)
        c, e = _renorm(self.coef * alpha, self.exp.copy())
        return Coords(self.idx.copy(), c, e)

    def truncate(self, max_index):
        keep = self.idx <= max_index
        return Coords(self.idx[keep], self.coef[keep], self.exp[keep])

    def __add__(self, other):
        return Coords.from_parts([self, other])

    def __sub__(self, other):
        return Coords.from_parts([self, other.scale(-1.0)])

    def norm_log2(self, p=2.0):
        if self.is_zero:
            return -math.inf
        t = self.log2abs()
        m = t.max()
        if math.isinf(p):
            return float(m)
        return float(m + np.log2(np.exp2(p * (t - m)).sum()) / p)

    def coordinate(self, j):
        k = np.searchsorted(self.idx, j)
        if k < self.idx.size and self.idx[k] == j:
            return self.coef[k] * 2.0 ** int(self.exp[k])
        return 0.0

    def same_as(self, other):
        return (np.array_equal(self.idx, other.idx) and np.array_equal(self.coef, other.coef)
                and np.array_equal(self.exp, other.exp))


def _scaled(value):
    """(coef, exp) for a float/complex/Fraction value."""
    if isinstance(value, Fraction):
        if value == 0:
            return 0.0, 0
        num, den = value.numerator, value.denominator
        shift = num.bit_length() - den.bit_length()
        mant = float(Fraction(num, den) / Fraction(2) ** shift)
        m, e = math.frexp(mant)
        return m, e + shift
    if isinstance(value, complex):
        mag = abs(value)
        if mag == 0:
            return 0j, 0
        _, e = math.frexp(mag)
        return value * 2.0 ** -e, e
    value = float(value)
    return math.frexp(value)


# -------------------------------------------------------------- supports --

@dataclass(frozen=True)
class FiniteSupport:
    """Explicit entries ``(index, coef, exp)`` meaning ``coef * 2**exp``."""

    entries: tuple

    @classmethod
    def from_values(cls, pairs):
        out = []
        for j, v in pairs:
            j = int(j)
            if j < 1:
                raise SpecError("entries", f"indices are 1-based, got {j}")
            c, e = _scaled(v)
            out.append((j, c, e))
        return cls(tuple(sorted(out, key=lambda t: t[0])))

    @property
    def last_index(self):
        return max((j for j, _, _ in self.entries), default=0)

    def materialize(self, max_index):
        if not self.entries:
            return Coords.empty()
        idx = np.array([j for j, _, _ in self.entries], np.int64)
        coef = np.array([c for _, c, _ in self.entries])
        ex = np.array([e for _, _, e in self.entries], np.int64)
        return Coords.from_parts([Coords(idx, coef, ex)]).truncate(max_index)

    def tail_log2(self, J, p):
        tail = [math.log2(abs(c)) + e for j, c, e in self.entries if j > J and c != 0]
        if not tail:
            return -math.inf
        return max(tail) + math.log2(len(tail)) / p

    def to_json(self):
        return {"kind": "finite",
                "entries": [[j, _jsonable(c), e] if e else [j, _jsonable(c)]
                            for j, c, e in self.entries]}


def _jsonable(c):
    if isinstance(c, complex) or np.iscomplexobj(c):
        return [float(np.real(c)), float(np.imag(c))]
    return float(c)


@dataclass(frozen=True)
class PatternSupport:
    """Coordinates ``a_k`` at indices ``index(k)`` for ``k >= k_min``.

    ``k_max=None`` makes the support infinite; it is then materialized
    lazily up to the requested index plus ``lookahead`` further terms.
    """

    index: str
    amplitude: str
    k_min: int = 1
    k_max: int | None = None
    lookahead: int = 2

    @functools.cached_property
    def _rules(self):
        return IndexRule(self.index), AmplitudeRule(self.amplitude)

    @property
    def last_index(self):
        if self.k_max is None:
            return None
        return self._rules[0](self.k_max)

    def terms(self, max_index):
        idx_rule, amp_rule = self._rules
        out = []
        prev = 0
        extra = 0
        k = self.k_min
        while self.k_max is None or k <= self.k_max:
            j = idx_rule(k)
            if j <= prev or j < 1:
                raise SpecError("index", f"pattern index must be increasing and >= 1 (k={k} -> {j})")
            prev = j
            if j > max_index:
                if self.k_max is not None or extra >= self.lookahead:
                    break
                extra += 1
            out.append((j, amp_rule(k, j)))
            k += 1
        return out

    def materialize(self, max_index):
        return _pattern_coords(self, int(max_index))

    def _build(self, max_index):
        terms = self.terms(max_index)
        if not terms:
            return Coords.empty()
        idx = np.array([j for j, _ in terms], np.int64)
        scaled = [mp_to_scaled(a) for _, a in terms]
        coef = np.array([c for c, _ in scaled])
        ex = np.array([e for _, e in scaled], np.int64)
        return Coords.from_parts([Coords(idx, coef, ex)])

    def tail_log2(self, J, p, probe=64):
        idx_rule, amp_rule = self._rules
        if self.k_max is not None:
            mags = [float(_mp_log2(a)) for j, a in self.terms(self.last_index) if j > J and a != 0]
            return max(mags) + math.log2(len(mags)) / p if mags else -math.inf
        k = self.k_min
        while idx_rule(k) <= J:
            k += 1
        mags = [float(_mp_log2(amp_rule(kk, idx_rule(kk)))) for kk in range(k, k + probe)]
        # the probed terms must be decaying, otherwise the series diverges
        half = mags[probe // 2:]
        if any(b > a + 1e-9 for a, b in zip(half, half[1:])):
            return math.inf
        return max(mags) + math.log2(2 * probe) / p

    def to_json(self):
        return {"kind": "pattern", "index": self.index, "amplitude": self.amplitude,
                "k_min": self.k_min, "k_max": self.k_max}


@functools.lru_cache(maxsize=256)
def _pattern_coords(support, max_index):
    return support._build(max_index)


def _mp_log2(a):
    import mpmath

    if a == 0:
        return -math.inf
    return mpmath.log(abs(a), 2)


@dataclass(frozen=True)
class GeometricSupport:
    """Dense coordinates ``x_j = scale * ratio**j``; needs ``|ratio| < 1``."""

    scale: float
    ratio: float
    cutoff_log2: float = -1100.0

    def materialize(self, max_index):
        if self.scale == 0:
            return Coords.empty()
        lr = math.log2(abs(self.ratio)) if self.ratio else -math.inf
        top = max_index
        if lr < 0:
            top = min(max_index, max(1, int((self.cutoff_log2 - math.log2(abs(self.scale))) / lr)))
        j = np.arange(1, top + 1, dtype=np.int64)
        la = math.log2(abs(self.scale)) + lr * j
        ex = np.ceil(la).astype(np.int64)
        sign = np.sign(self.scale) * np.where((j % 2 == 1) & (self.ratio < 0), -1.0, 1.0)
        coef = sign * np.exp2(la - ex)
        c, e = _renorm(coef, ex)
        return Coords(j, c, e)

    @property
    def last_index(self):
        return None

    def tail_log2(self, J, p):
        if abs(self.ratio) >= 1:
            return math.inf
        lr = math.log2(abs(self.ratio))
        return math.log2(abs(self.scale)) + lr * (J + 1) - math.log2(1 - abs(self.ratio) ** p) / p

    def to_json(self):
        return {"kind": "geometric", "scale": self.scale, "ratio": self.ratio}


# ----------------------------------------------------------- lazy vector --

@dataclass(frozen=True)
class LazyVector:
    """A sequence-space element given as a finite sum of scaled supports."""

    space: Space
    terms: tuple = ()

    @classmethod
    def zero(cls, space=L2):
        return cls(space, ())

    @classmethod
    def basis(cls, j, space=L2, value=1.0):
        return cls(space, ((1.0, FiniteSupport.from_values([(j, value)])),))

    @classmethod
    def finite(cls, pairs, space=L2):
        return cls(space, ((1.0, FiniteSupport.from_values(pairs)),))

    @classmethod
    def pattern(cls, index, amplitude, k_min=1, k_max=None, space=L2):
        return cls(space, ((1.0, PatternSupport(index, amplitude, k_min, k_max)),))

    @classmethod
    def from_coords(cls, coords, space=L2):
        entries = tuple((int(j), c.item() if hasattr(c, "item") else c, int(e))
                        for j, c, e in zip(coords.idx, coords.coef, coords.exp))
        return cls(space, ((1.0, FiniteSupport(entries)),))

    def _check(self, other):
        if not isinstance(other, LazyVector):
            return NotImplemented
        if other.space != self.space:
            raise IncompatibleSpaces(f"{self.space} vs {other.space}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return LazyVector(self.space, self.terms + other.terms)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, alpha):
        if not isinstance(alpha, (int, float, complex, np.number)):
            return NotImplemented
        if alpha == 0:
            return LazyVector(self.space, ())
        return LazyVector(self.space, tuple((a * alpha, s) for a, s in self.terms))

    __rmul__ = __mul__

    @property
    def last_index(self):
        """Largest support index, or ``None`` if the support is infinite."""
        top = 0
        for _, s in self.terms:
            li = s.last_index
            if li is None:
                return None
            top = max(top, li)
        return top

    @property
    def is_finite(self):
        return self.last_index is not None

    def materialize(self, max_index):
        return _materialize(self, int(max_index))

    def norm_support_index(self, rel_log2=-80.0):
        """An index beyond which the remaining coordinates are negligible."""
        li = self.last_index
        if li is not None:
            return li
        J = 64
        head = self.materialize(J).norm_log2(self.space.p if self.space.kind == "lp" else 2.0)
        while J < 1 << 22:
            if self.tail_log2(J) < head + rel_log2:
                return J
            J *= 2
        return J

    def tail_log2(self, J):
        """log2 of an estimate of the ell^p norm of coordinates beyond ``J``."""
        p = self.space.p if self.space.kind == "lp" else 2.0
        worst = -math.inf
        for a, s in self.terms:
            if a == 0:
                continue
            worst = max(worst, math.log2(abs(a)) + s.tail_log2(J, p))
        if np.isfinite(worst):
            worst += math.log2(max(1, len(self.terms)))
        return worst

    def in_space(self):
        """True when the ell^p tail bound decays (always true for omega)."""
        if self.space.kind != "lp" or self.is_finite:
            return True
        return self.tail_log2(1 << 12) < self.tail_log2(64) - 8 and np.isfinite(self.tail_log2(64))

    def coordinate(self, j):
        return self.materialize(j).coordinate(j)

    def to_json(self):
        if len(self.terms) == 1 and self.terms[0][0] == 1.0:
            out = self.terms[0][1].to_json()
        else:
            out = {"kind": "sum",
                   "terms": [{"coef": _jsonable(a), "vector": s.to_json()} for a, s in self.terms]}
        out["space"] = self.space.to_json()
        return out


@functools.lru_cache(maxsize=512)
def _materialize(vec, max_index):
    dtype = np.complex128 if any(isinstance(a, complex) for a, _ in vec.terms) else None
    parts = []
    for a, s in vec.terms:
        c = s.materialize(max_index)
        parts.append(c if a == 1.0 else c.scale(a))
    return Coords.from_parts(parts, dtype=dtype)


def basis(j, space=L2):
    return LazyVector.basis(j, space)


# ------------------------------------------------------------------ torus --

@dataclass(frozen=True)
class TorusPoint:
    """Exact point of ``T^k = (R/Z)^k``: ``nums[i] / den`` reduced mod 1."""

    nums: tuple
    den: int = 1

    def __post_init__(self):
        if self.den < 1:
            raise SpecError("den", "denominator must be positive")
        object.__setattr__(self, "nums", tuple(int(a) % self.den for a in self.nums))

    @classmethod
    def from_fractions(cls, values):
        fr = [Fraction(v) for v in values]
        den = math.lcm(*[f.denominator for f in fr]) if fr else 1
        return cls(tuple(f.numerator * (den // f.denominator) for f in fr), den)

    @classmethod
    def dyadic(cls, nums, exponent):
        return cls(tuple(nums), 1 << int(exponent))

    @classmethod
    def from_bits(cls, bits, base=2):
        """``sum_b base**(-b)`` per coordinate; ``bits`` is a list or list of lists."""
        if bits and not isinstance(bits[0], (list, tuple)):
            bits = [bits]
        top = max((max(b) for b in bits if b), default=0)
        den = base ** top
        return cls(tuple(sum(base ** (top - b) for b in bb) for bb in bits), den)

    @property
    def dim(self):
        return len(self.nums)

    @property
    def space(self):
        return Space.torus(self.dim)

    @property
    def dyadic_exponent(self):
        """``e`` with ``den == 2**e`` or ``None``."""
        if self.den & (self.den - 1):
            return None
        return self.den.bit_length() - 1

    def fractions(self):
        return tuple(Fraction(a, self.den) for a in self.nums)

    def _common(self, other):
        if not isinstance(other, TorusPoint):
            return NotImplemented
        if other.dim != self.dim:
            raise IncompatibleSpaces(f"torus dims {self.dim} vs {other.dim}")
        den = math.lcm(self.den, other.den)
        return den, den // self.den, den // other.den

    def __add__(self, other):
        den, a, b = self._common(other)
        return TorusPoint(tuple(x * a + y * b for x, y in zip(self.nums, other.nums)), den)

    def __sub__(self, other):
        den, a, b = self._common(other)
        return TorusPoint(tuple(x * a - y * b for x, y in zip(self.nums, other.nums)), den)

    def __neg__(self):
        return TorusPoint(tuple(-x for x in self.nums), self.den)

    def __eq__(self, other):
        if not isinstance(other, TorusPoint):
            return NotImplemented
        return self.fractions() == other.fractions()

    def __hash__(self):
        return hash(self.fractions())

    @property
    def is_zero(self):
        return not any(self.nums)

    def dist0_exact(self):
        """Max over coordinates of the circle distance to 0, exactly."""
        best = 0
        for a in self.nums:
            best = max(best, min(a, self.den - a))
        return Fraction(best, self.den)

    def at_precision(self, nbits):
        return self

    def leading_bit(self, coord=0):
        """Position of the first nonzero binary digit (1 = 1/2), ``None`` for 0."""
        a = self.nums[coord]
        if a == 0:
            return None
        f = Fraction(a, self.den)
        pos = 0
        while f < 1:
            f *= 2
            pos += 1
        return pos

    def to_json(self):
        e = self.dyadic_exponent
        if e is not None:
            return {"kind": "dyadic_torus", "nums": [str(a) for a in self.nums], "exponent": e}
        return {"kind": "rational_torus", "values": [str(f) for f in self.fractions()]}


@dataclass(frozen=True)
class LazyTorusPoint:
    """Digit-pattern torus point ``sum_k base**(-index(k))`` in one coordinate.

    It is materialized exactly, truncated at the requested binary precision.
    """

    index: str
    base: int = 2
    k_min: int = 1
    dim: int = 1
    coord: int = 0

    @property
    def space(self):
        return Space.torus(self.dim)

    def at_precision(self, nbits):
        rule = IndexRule(self.index)
        digits_cap = max(1, math.ceil(nbits / math.log2(self.base)))
        pos = []
        k = self.k_min
        while True:
            b = rule(k)
            if b > digits_cap:
                break
            pos.append(b)
            k += 1
        if not pos:
            return TorusPoint((0,) * self.dim, 1)
        top = pos[-1]
        den = self.base ** top
        num = sum(self.base ** (top - b) for b in pos)
        nums = [0] * self.dim
        nums[self.coord] = num
        return TorusPoint(tuple(nums), den)

    def to_json(self):
        return {"kind": "dyadic_torus", "bits_pattern": self.index, "base": self.base,
                "k_min": self.k_min, "dim": self.dim, "coord": self.coord}


def torus_reduce(values):
    """Componentwise fractional part, exact, in ``[0, 1)``."""
    out = []
    for v in values:
        f = Fraction(v)
        out.append(f - math.floor(f))
    return tuple(out)


# ---------------------------------------------------------------- metrics --

@dataclass(frozen=True)
class SeminormFamily:
    """Increasing prefix seminorms ``p_j(x) = ||(x_1..x_j)||_q``."""

    kind: str = "prefix_l2"  # prefix_l2 | prefix_sup | prefix_l1
    J_max: int = 20
    monotone: bool = True

    @property
    def q(self):
        return {"prefix_l2": 2.0, "prefix_sup": math.inf, "prefix_l1": 1.0}[self.kind]

    def evaluate(self, coords: Coords, j):
        return float(2.0 ** coords.truncate(j).norm_log2(self.q))

    def evaluate_all_log2(self, window_log2):
        """``window_log2[..., j-1] = log2|x_j|`` -> log2 p_j for j = 1..J."""
        q = self.q
        with np.errstate(invalid="ignore"):
            if math.isinf(q):
                return np.maximum.accumulate(window_log2, axis=-1)
            return np.logaddexp2.accumulate(q * window_log2, axis=-1) / q


@dataclass(frozen=True)
class MetricSpec:
    kind: str  # banach | bounded | frechet | seminorm | torus
    p: float = 2.0
    family: SeminormFamily = field(default_factory=SeminormFamily)
    m: int = 0

    @classmethod
    def banach(cls, p=2.0):
        return cls("banach", p=float(p))

    @classmethod
    def bounded(cls, p=2.0):
        return cls("bounded", p=float(p))

    @classmethod
    def frechet(cls, J_max=20, family="prefix_l2"):
        return cls("frechet", family=SeminormFamily(family, int(J_max)))

    @classmethod
    def seminorm(cls, m, family="prefix_l2"):
        return cls("seminorm", family=SeminormFamily(family, int(m)), m=int(m))

    @classmethod
    def torus(cls):
        return cls("torus")

    @property
    def error_bound(self):
        return 2.0 ** -self.family.J_max if self.kind == "frechet" else 0.0

    @property
    def bounded_by_one(self):
        return self.kind in ("bounded", "frechet", "torus")

    @property
    def translation_invariant(self):
        return True

    def check(self, space):
        if space.kind == "torus":
            ok = self.kind == "torus"
        elif space.kind == "omega":
            ok = self.kind in ("frechet", "seminorm")
        else:
            ok = self.kind in ("frechet", "seminorm") or (
                self.kind in ("banach", "bounded") and self.p == space.p)
        if not ok:
            raise IncompatibleSpaces(f"metric {self.kind} (p={self.p}) not defined on {space}")

    def unbounded_companion(self):
        """The seminorm ``rho`` whose growth defines irregularity."""
        if self.kind in ("banach", "bounded"):
            return MetricSpec.banach(self.p)
        if self.kind == "frechet":
            return MetricSpec.seminorm(self.family.J_max, self.family.kind)
        if self.kind == "seminorm":
            return self
        return None

    def seminorm_at(self, m):
        """Companion seminorm with index ``m``; Banach norms ignore ``m``."""
        if m is None or self.kind in ("banach", "bounded", "torus"):
            return self.unbounded_companion()
        return MetricSpec.seminorm(m, self.family.kind)

    def to_json(self):
        if self.kind in ("banach", "bounded"):
            return {"kind": self.kind, "p": "inf" if math.isinf(self.p) else self.p}
        if self.kind == "frechet":
            return {"kind": "frechet", "family": self.family.kind, "J_max": self.family.J_max}
        if self.kind == "seminorm":
            return {"kind": "seminorm", "family": self.family.kind, "m": self.m}
        return {"kind": "torus"}


def default_metric(space):
    if space.kind == "torus":
        return MetricSpec.torus()
    if space.kind == "omega":
        return MetricSpec.frechet()
    return MetricSpec.banach(space.p)


def parse_metric(text, space=L2):
    """``l2``, ``l1``, ``linf``, ``lp:3``, ``bounded``, ``frechet[:J]``, ``seminorm:m``, ``torus``."""
    if text is None or text == "default":
        return default_metric(space)
    if isinstance(text, dict):
        kind = text.get("kind")
        if kind in ("banach", "bounded"):
            p = text.get("p", 2)
            return MetricSpec(kind, p=math.inf if p == "inf" else float(p))
        if kind == "frechet":
            return MetricSpec.frechet(text.get("J_max", 20), text.get("family", "prefix_l2"))
        if kind == "seminorm":
            return MetricSpec.seminorm(text.get("m", 1), text.get("family", "prefix_l2"))
        if kind == "torus":
            return MetricSpec.torus()
        raise SpecError("metric.kind", f"unknown metric {kind!r}")
    name, _, arg = str(text).partition(":")
    if name in ("l1", "l2", "linf"):
        return MetricSpec.banach({"l1": 1, "l2": 2, "linf": math.inf}[name])
    if name == "lp":
        return MetricSpec.banach(math.inf if arg == "inf" else float(arg))
    if name == "bounded":
        return MetricSpec.bounded(space.p if space.kind == "lp" else 2.0)
    if name == "frechet":
        return MetricSpec.frechet(int(arg) if arg else 20)
    if name == "seminorm":
        return MetricSpec.seminorm(int(arg) if arg else 1)
    if name == "torus":
        return MetricSpec.torus()
    raise SpecError("metric", f"unknown metric {text!r}")


def distance_log2_from_coords(m: MetricSpec, diff: Coords):
    """log2 of the distance between a vector pair given their difference."""
    if m.kind == "banach":
        return diff.norm_log2(m.p)
    if m.kind == "bounded":
        return min(diff.norm_log2(m.p), 0.0)
    fam = m.family
    J = fam.J_max
    window = np.full(J, -np.inf)
    d = diff.truncate(J)
    window[d.idx - 1] = d.log2abs()
    pj = fam.evaluate_all_log2(window)
    if m.kind == "seminorm":
        return float(pj[-1])
    return float(frechet_from_pj_log2(pj[None, :])[0])


def frechet_from_pj_log2(pj_log2):
    """``sum_j 2**-j min(1, p_j)`` from an (N, J) array of log2 p_j."""
    J = pj_log2.shape[-1]
    w = np.exp2(-np.arange(1, J + 1, dtype=np.float64))
    with np.errstate(over="ignore"):
        capped = np.exp2(np.minimum(pj_log2, 0.0))
    total = capped @ w
    with np.errstate(divide="ignore"):
        return np.log2(total)


def evaluate_metric(m: MetricSpec, x, y):
    """Return ``(distance, error_bound)``.

    The bound is ``2**-J_max`` for the truncated Frechet metric, the
    coordinate-truncation estimate for infinitely supported vectors under a
    Banach norm, and 0 otherwise.
    """
    if isinstance(x, TorusPoint) or isinstance(y, TorusPoint):
        if not (isinstance(x, TorusPoint) and isinstance(y, TorusPoint)):
            raise IncompatibleSpaces("torus point paired with a sequence vector")
        if m.kind != "torus":
            raise IncompatibleSpaces(f"metric {m.kind} on a torus")
        return float((x - y).dist0_exact()), 0.0
    if x.space != y.space:
        raise IncompatibleSpaces(f"{x.space} vs {y.space}")
    m.check(x.space)
    diff = x - y
    err = m.error_bound
    if m.kind in ("frechet", "seminorm"):
        coords = diff.materialize(m.family.J_max)
    else:
        J = diff.norm_support_index()
        coords = diff.materialize(J)
        if not diff.is_finite:
            err = max(err, 2.0 ** diff.tail_log2(J))
    lg = distance_log2_from_coords(m, coords)
    return float(2.0 ** lg) if lg > -math.inf else 0.0, err


def torus_distance(x: TorusPoint, y: TorusPoint) -> Fraction:
    return (x - y).dist0_exact()


# ---------------------------------------------------------------- parsing --

def _parse_value(v, fld):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError as exc:
            raise SpecError(fld, f"bad number {v!r}") from exc
    if isinstance(v, (int, float)):
        return v
    raise SpecError(fld, f"bad coordinate value {v!r}")


def parse_vector(spec, space=None):
    """Build a vector from the JSON vector grammar (or an inline shorthand)."""
    if isinstance(spec, str):
        return _parse_inline(spec, space)
    if not isinstance(spec, dict):
        raise SpecError("vector", "expected a JSON object")
    kind = spec.get("kind")
    if "space" in spec:
        space = parse_space(spec["space"])
    if kind in ("dyadic_torus", "rational_torus"):
        return _parse_torus(spec, kind)
    space = space or L2
    if space.kind == "torus":
        raise SpecError("vector.kind", f"{kind!r} is not a torus point kind")
    if kind == "finite":
        entries = spec.get("entries")
        if not isinstance(entries, list):
            raise SpecError("vector.entries", "finite vector needs an 'entries' list")
        out = []
        for i, e in enumerate(entries):
            if not isinstance(e, (list, tuple)) or len(e) not in (2, 3):
                raise SpecError(f"vector.entries[{i}]", "expected [index, value] or [index, value, exp2]")
            j, val = int(e[0]), _parse_value(e[1], f"vector.entries[{i}]")
            if j < 1:
                raise SpecError(f"vector.entries[{i}]", "indices are 1-based")
            c, ex = _scaled(val)
            if len(e) == 3:
                ex += int(e[2])
            out.append((j, c, ex))
        return LazyVector(space, ((1.0, FiniteSupport(tuple(sorted(out, key=lambda t: t[0])))),))
    if kind == "basis":
        return LazyVector.basis(int(spec.get("index", 1)), space)
    if kind == "pattern":
        for key in ("index", "amplitude"):
            if key not in spec:
                raise SpecError(f"vector.{key}", "pattern vector needs index and amplitude rules")
        try:
            sup = PatternSupport(spec["index"], spec["amplitude"], int(spec.get("k_min", 1)),
                                 spec.get("k_max"))
            sup._rules  # noqa: B018 - validate expressions eagerly
        except ValueError as exc:
            raise SpecError("vector.index", str(exc)) from exc
        return LazyVector(space, ((1.0, sup),))
    if kind == "geometric":
        return LazyVector(space, ((1.0, GeometricSupport(float(spec.get("scale", 1.0)),
                                                         float(spec["ratio"]))),))
    if kind == "sum":
        total = LazyVector.zero(space)
        for i, t in enumerate(spec.get("terms", [])):
            vec = parse_vector(t["vector"], space)
            total = total + _parse_value(t.get("coef", 1.0), f"vector.terms[{i}].coef") * vec
        return total
    raise SpecError("vector.kind", f"unknown vector kind {kind!r}")


def _parse_torus(spec, kind):
    if kind == "rational_torus":
        vals = spec.get("values")
        if not vals:
            raise SpecError("vector.values", "rational torus point needs 'values'")
        return TorusPoint.from_fractions([Fraction(str(v)) for v in vals])
    if "bits_pattern" in spec:
        return LazyTorusPoint(spec["bits_pattern"], int(spec.get("base", 2)),
                              int(spec.get("k_min", 1)), int(spec.get("dim", 1)),
                              int(spec.get("coord", 0)))
    if "nums" in spec:
        return TorusPoint.dyadic([int(a) for a in spec["nums"]], int(spec["exponent"]))
    if "bits" not in spec:
        raise SpecError("vector.bits", "dyadic torus point needs 'bits'")
    return TorusPoint.from_bits(spec["bits"], int(spec.get("base", 2)))


def _parse_inline(text, space):
    text = text.strip()
    if text.startswith("{"):
        return parse_vector(json.loads(text), space)
    if text.startswith("e") and text[1:].isdigit():
        return LazyVector.basis(int(text[1:]), space or L2)
    try:
        parts = [Fraction(t) for t in text.split(",")]
    except ValueError as exc:
        raise SpecError("vector", f"cannot parse inline vector {text!r}") from exc
    return TorusPoint.from_fractions(parts)


def parse_vector_list(text, space=None):
    """``e1:e20`` ranges, comma lists of basis vectors, or a JSON list."""
    if isinstance(text, list):
        return [parse_vector(v, space) for v in text]
    text = text.strip()
    if text.startswith("["):
        return [parse_vector(v, space) for v in json.loads(text)]
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if ":" in chunk:
            a, b = chunk.split(":")
            if not (a.startswith("e") and b.startswith("e")):
                raise SpecError("vector-list", f"bad range {chunk!r}")
            out.extend(LazyVector.basis(j, space or L2) for j in range(int(a[1:]), int(b[1:]) + 1))
        elif chunk:
            out.append(_parse_inline(chunk, space))
    return out
