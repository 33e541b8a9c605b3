import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaoscope.spaces import (L2, IncompatibleSpaces, LazyTorusPoint, LazyVector, MetricSpec,
                              SeminormFamily, Space, SpecError, TorusPoint, evaluate_metric,
                              parse_metric, parse_vector, torus_reduce)

finite_entries = st.dictionaries(st.integers(1, 60), st.floats(-1e3, 1e3, allow_nan=False)
                                 .filter(lambda v: abs(v) > 1e-6), min_size=1, max_size=12)


def vec(d, space=L2):
    return LazyVector.finite(sorted(d.items()), space)


def test_distance_to_self_is_zero():
    x = LazyVector.finite([(1, 0.3), (4, -2.0)])
    for m in (MetricSpec.banach(), MetricSpec.bounded(), MetricSpec.frechet(), MetricSpec.seminorm(3)):
        assert evaluate_metric(m, x, x)[0] == 0.0


def test_unit_basis_norm():
    assert evaluate_metric(MetricSpec.banach(), LazyVector.basis(1), LazyVector.zero()) == (1.0, 0.0)


def test_frechet_geometric_sum():
    fam = MetricSpec("frechet", family=SeminormFamily("prefix_sup", 20))
    d, err = evaluate_metric(fam, LazyVector.basis(1), LazyVector.zero())
    assert d == 1 - 2.0 ** -20
    assert err == 2.0 ** -20


def test_torus_reduce():
    assert torus_reduce([Fraction(5, 3)]) == (Fraction(2, 3),)
    assert torus_reduce([Fraction(-1, 4)]) == (Fraction(3, 4),)


def test_torus_reduce_dyadic_shift():
    # with k <= 5 the product is an integer; the sixth term puts the first digit at 36 - 25
    five = sum(Fraction(1, 2 ** (k * k)) for k in range(1, 6))
    assert torus_reduce([2 ** 25 * five]) == (Fraction(0),)
    six = sum(Fraction(1, 2 ** (k * k)) for k in range(1, 7))
    (r,) = torus_reduce([2 ** 25 * six])
    assert TorusPoint.from_fractions([r]).leading_bit() == 11


def test_incompatible_spaces():
    x = LazyVector.basis(1, Space.lp(1))
    with pytest.raises(IncompatibleSpaces):
        evaluate_metric(MetricSpec.banach(), x, LazyVector.basis(1))
    with pytest.raises(IncompatibleSpaces):
        evaluate_metric(MetricSpec.banach(2), x, x)
    with pytest.raises(IncompatibleSpaces):
        evaluate_metric(MetricSpec.torus(), TorusPoint.from_fractions([0]), x)


def test_bounded_metric_caps_at_one():
    x = LazyVector.basis(3) * 7.0
    assert evaluate_metric(MetricSpec.bounded(), x, LazyVector.zero())[0] == 1.0
    assert evaluate_metric(MetricSpec.bounded(), 0.25 * x, LazyVector.zero())[0] == 1.0
    assert evaluate_metric(MetricSpec.bounded(), x * (1 / 14), LazyVector.zero())[0] == 0.5


def test_infinite_pattern_norm():
    x = LazyVector.pattern("k^2", "k*2^(-k^2)", k_min=2)
    d, err = evaluate_metric(MetricSpec.banach(), x, LazyVector.zero())
    exact = math.sqrt(sum((k * 2.0 ** -(k * k)) ** 2 for k in range(2, 12)))
    assert abs(d - exact) <= 1e-15
    assert err < 1e-20


def test_torus_metric_exact():
    x = TorusPoint.from_fractions([Fraction(1, 3), Fraction(9, 10)])
    y = TorusPoint.from_fractions([Fraction(0), Fraction(1, 10)])
    assert evaluate_metric(MetricSpec.torus(), x, y)[0] == 1 / 3
    assert (x - y).dist0_exact() == Fraction(1, 3)


@settings(max_examples=80, deadline=None)
@given(finite_entries, finite_entries, finite_entries)
def test_translation_invariance_banach(a, b, c):
    x, y, z = vec(a), vec(b), vec(c)
    for m in (MetricSpec.banach(), MetricSpec.banach(1), MetricSpec.frechet()):
        if m.kind == "banach" and m.p != 2:
            x1, y1, z1 = vec(a, Space.lp(1)), vec(b, Space.lp(1)), vec(c, Space.lp(1))
        else:
            x1, y1, z1 = x, y, z
        d0 = evaluate_metric(m, x1, y1)[0]
        d1 = evaluate_metric(m, x1 + z1, y1 + z1)[0]
        assert d1 == pytest.approx(d0, rel=1e-12, abs=1e-12 * max(1.0, d0))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.fractions(), min_size=1, max_size=3), st.data())
def test_translation_invariance_torus(xs, data):
    k = len(xs)
    ys = data.draw(st.lists(st.fractions(), min_size=k, max_size=k))
    zs = data.draw(st.lists(st.fractions(), min_size=k, max_size=k))
    x, y, z = (TorusPoint.from_fractions(v) for v in (xs, ys, zs))
    assert (x + z - (y + z)).dist0_exact() == (x - y).dist0_exact()


@settings(max_examples=60, deadline=None)
@given(finite_entries, st.floats(-1e3, 1e3, allow_nan=False).filter(lambda a: abs(a) > 1e-3))
def test_banach_scaling(a, alpha):
    x = vec(a)
    m = MetricSpec.banach()
    zero = LazyVector.zero()
    scaled = evaluate_metric(m, alpha * x, zero)[0]
    assert scaled == pytest.approx(abs(alpha) * evaluate_metric(m, x, zero)[0], rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(finite_entries)
def test_frechet_bounded_by_one(a):
    d, _ = evaluate_metric(MetricSpec.frechet(), vec(a), LazyVector.zero())
    assert 0 <= d <= 1


def test_seminorm_monotonicity(rng):
    for kind in ("prefix_l2", "prefix_sup", "prefix_l1"):
        fam = SeminormFamily(kind, 30)
        for _ in range(1000):
            k = int(rng.integers(1, 20))
            idx = np.sort(rng.choice(np.arange(1, 41), size=k, replace=False))
            x = LazyVector.finite(zip(idx.tolist(), rng.normal(size=k).tolist())).materialize(40)
            vals = [fam.evaluate(x, j) for j in range(1, 31)]
            assert all(u <= v for u, v in zip(vals, vals[1:]))


def test_seminorm_homogeneous_and_subadditive(rng):
    fam = SeminormFamily("prefix_l2", 10)
    for _ in range(200):
        a = LazyVector.finite(enumerate(rng.normal(size=8).tolist(), 1))
        b = LazyVector.finite(enumerate(rng.normal(size=8).tolist(), 3))
        pa, pb = fam.evaluate(a.materialize(20), 6), fam.evaluate(b.materialize(20), 6)
        assert fam.evaluate((a + b).materialize(20), 6) <= (pa + pb) * (1 + 1e-14)
        assert fam.evaluate((-3.0 * a).materialize(20), 6) == pytest.approx(3 * pa, rel=1e-15)


def test_parse_metric():
    assert parse_metric("l2") == MetricSpec.banach(2)
    assert parse_metric("linf") == MetricSpec.banach(math.inf)
    assert parse_metric("frechet:12").family.J_max == 12
    assert parse_metric("seminorm:5").m == 5
    assert parse_metric("bounded", Space.lp(1)).p == 1.0
    with pytest.raises(SpecError):
        parse_metric("hilbert")


def test_parse_vector_grammar():
    x = parse_vector({"kind": "finite", "entries": [[2, 1.5], [5, "1/3"]]})
    assert x.coordinate(2) == 1.5 and x.coordinate(5) == pytest.approx(1 / 3)
    p = parse_vector({"kind": "pattern", "index": "k^2", "amplitude": "k*2^(-k^2)", "k_max": 3})
    assert p.last_index == 9 and p.coordinate(4) == 2 * 2.0 ** -4
    t = parse_vector({"kind": "dyadic_torus", "bits": [1, 3]})
    assert t.fractions() == (Fraction(5, 8),)
    lazy = parse_vector({"kind": "dyadic_torus", "bits_pattern": "k^2"})
    assert isinstance(lazy, LazyTorusPoint)
    assert parse_vector("1/3").fractions() == (Fraction(1, 3),)


@pytest.mark.parametrize("spec, field", [
    ({"kind": "finite"}, "vector.entries"),
    ({"kind": "finite", "entries": [[0, 1.0]]}, "vector.entries[0]"),
    ({"kind": "pattern", "index": "k^2"}, "vector.amplitude"),
    ({"kind": "blob"}, "vector.kind"),
])
def test_parse_vector_errors_name_field(spec, field):
    with pytest.raises(SpecError) as info:
        parse_vector(spec)
    assert info.value.field == field


def test_lazy_torus_point_materializes_exactly():
    x = LazyTorusPoint("k^2").at_precision(1024)
    assert x.fractions()[0] == sum(Fraction(1, 2 ** (k * k)) for k in range(1, 33))
