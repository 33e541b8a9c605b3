from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaoscope.criteria import block_vector
from chaoscope.operators import (DirectSum, DirectSumVector, ScalarMultiple, UnsupportedOracle,
                                 WeightRule, apply, backward_shift, doubling_map, iterate,
                                 iterate_table, orbit_oracle, orbit_table, parse_operator)
from chaoscope.spaces import (IncompatibleSpaces, LazyTorusPoint, LazyVector, Space, SpecError,
                              TorusPoint)
from zoo import SEQUENCE_ZOO, TORUS_ZOO, random_finite, random_torus_point


def values(x, J=400):
    c = x.materialize(J)
    out = np.zeros(J + 1, dtype=complex)
    out[c.idx] = c.values()
    return out


def test_zero_operator():
    x = LazyVector.finite([(1, 2.0), (7, -1.0)])
    assert apply(parse_operator({"kind": "zero"}), x).materialize(10).is_zero


def test_single_shift_step():
    y = apply(parse_operator("2B"), LazyVector.basis(2))
    assert y.materialize(5).same_as(LazyVector.finite([(1, 2.0)]).materialize(5))


def test_torus_doubling_rational():
    assert apply(doubling_map(), TorusPoint.from_fractions([Fraction(1, 3)])).fractions() == (Fraction(2, 3),)


def test_block_oracle_at_24():
    x = block_vector(2.0)
    y = orbit_oracle(parse_operator("2B"), x, 24)
    # (2B)^24 moves coordinate 25 = 5^2 to index 1: 2^24 * 5 * 2^-25
    assert y.coordinate(1) == 2.5


def test_identity_oracle():
    x = LazyVector.finite([(3, 0.25), (9, -4.0)])
    assert orbit_oracle(parse_operator("I"), x, 1000).materialize(20).same_as(x.materialize(20))


def test_doubling_oracle_on_lazy_point():
    y = orbit_oracle(doubling_map(), LazyTorusPoint("k^2"), 25)
    assert y.leading_bit() == 11
    assert y.fractions()[0] < Fraction(1, 2 ** 10)


@pytest.mark.parametrize("name", sorted(SEQUENCE_ZOO))
def test_oracle_matches_iteration(name, rng):
    T = SEQUENCE_ZOO[name]
    for _ in range(10):
        x = random_finite(rng)
        for n in (1, 2, 5, 17, 64):
            a, b = values(iterate(T, x, n)), values(orbit_oracle(T, x, n))
            assert np.allclose(a, b, rtol=1e-12, atol=0)


@pytest.mark.parametrize("name", sorted(SEQUENCE_ZOO))
def test_tables_agree(name, rng):
    T = SEQUENCE_ZOO[name]
    c = random_finite(rng, max_index=600).materialize(600)
    ic, ie = iterate_table(T, c, 512)
    oc, oe = orbit_table(T, c, 512)
    assert np.array_equal(ic != 0, oc != 0)
    nz = oc != 0
    rel = np.abs(ic[nz] * np.ldexp(1.0, (ie - oe)[nz]) - oc[nz]) / np.abs(oc[nz])
    assert rel.size == 0 or rel.max() <= 1e-9


@pytest.mark.parametrize("name", sorted(TORUS_ZOO))
def test_torus_oracle_exact(name, rng):
    T = TORUS_ZOO[name]
    for dyadic in (True, False):
        x = random_torus_point(rng, T.space.dim, dyadic)
        y = x
        for n in range(1, 130):
            y = apply(T, y)
            assert y == orbit_oracle(T, x, n)


@pytest.mark.parametrize("name", sorted(SEQUENCE_ZOO))
def test_linearity(name, rng):
    T = SEQUENCE_ZOO[name]
    for _ in range(20):
        x, y = random_finite(rng), random_finite(rng)
        a, b = rng.normal(size=2)
        lhs = values(apply(T, a * x + b * y))
        rhs = a * values(apply(T, x)) + b * values(apply(T, y))
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.abs(rhs).max(initial=1.0))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(sorted(TORUS_ZOO)), st.integers(0, 2 ** 64), st.integers(0, 2 ** 64),
       st.integers(0, 2 ** 64), st.integers(0, 2 ** 64), st.integers(1, 70))
def test_torus_endomorphism(name, a, b, c, d, e):
    T = TORUS_ZOO[name]
    k = T.space.dim
    x = TorusPoint.dyadic([a, b][:k], e)
    y = TorusPoint.dyadic([c, d][:k], e + 3)
    assert apply(T, x + y) == apply(T, x) + apply(T, y)


def test_torus_dyadic_annihilation():
    x = TorusPoint.dyadic([1], 10)
    assert orbit_oracle(doubling_map(), x, 9).fractions() == (Fraction(1, 2),)
    assert orbit_oracle(doubling_map(), x, 10).is_zero


def test_unsupported_oracle():
    half_doubling = ScalarMultiple(0.5, doubling_map())
    with pytest.raises(UnsupportedOracle):
        orbit_oracle(half_doubling, TorusPoint.from_fractions([Fraction(1, 3)]), 3)
    with pytest.raises(UnsupportedOracle):
        apply(doubling_map(), LazyTorusPoint("k^2"))


def test_incompatible_tags():
    with pytest.raises(IncompatibleSpaces):
        apply(backward_shift(2.0), LazyVector.basis(1, Space.lp(1)))
    with pytest.raises(IncompatibleSpaces):
        apply(doubling_map(), LazyVector.basis(1))


def test_direct_sum_componentwise():
    T = parse_operator({"kind": "direct_sum", "parts": ["2B", "doubling"]})
    x = DirectSumVector((LazyVector.basis(3), TorusPoint.from_fractions([Fraction(1, 5)])))
    y = orbit_oracle(T, x, 2)
    assert y.components[0].coordinate(1) == 4.0
    assert y.components[1].fractions() == (Fraction(4, 5),)
    z = iterate(T, x, 2)
    assert z.components[1] == y.components[1]


def test_scalar_multiple_of_direct_sum_distributes():
    T = parse_operator({"kind": "scalar_multiple", "lambda": 3,
                        "inner": {"kind": "direct_sum", "parts": ["B", "I"]}})
    assert isinstance(T, DirectSum)
    x = DirectSumVector((LazyVector.basis(2), LazyVector.basis(1)))
    y = orbit_oracle(T, x, 1)
    assert y.components[0].coordinate(1) == pytest.approx(3.0, rel=1e-15)
    assert y.components[1].coordinate(1) == pytest.approx(3.0, rel=1e-15)


def test_weight_sup_reported():
    rule = WeightRule.periodic([2.0, -5.0, 0.5])
    assert rule.sup(10) == 5.0
    assert WeightRule.ramp(0.5, 2.0, 10).sup(4) == pytest.approx(0.5 + 1.5 * 0.3)


def test_infinite_vector_image_is_lazy():
    x = block_vector(2.0)
    y = orbit_oracle(parse_operator("2B"), x, 62 ** 2 - 1)
    # coordinate 1 carries 62 * 2^-(62^2) * 2^(62^2 - 1) = 31
    assert y.coordinate(1) == 31.0


@pytest.mark.parametrize("spec, field", [
    ({"kind": "weighted_backward_shift"}, "operator.weights"),
    ({"kind": "torus_matrix", "matrix": [[1.5]]}, "operator.matrix"),
    ({"kind": "diagonal"}, "operator.diagonal"),
    ({"kind": "spin"}, "operator.kind"),
    ({"space": "l2"}, "operator.kind"),
    ({"kind": "direct_sum", "parts": []}, "operator.parts"),
    ("3C", "operator"),
])
def test_parse_errors_name_field(spec, field):
    with pytest.raises(SpecError) as info:
        parse_operator(spec)
    assert info.value.field == field


def test_shorthands():
    T = parse_operator("2B")
    assert isinstance(T, ScalarMultiple) and T.lam == 2.0
    assert parse_operator("B").weights.values == (1.0,)
    assert parse_operator("doubling").matrix == ((2,),)
    assert orbit_oracle(parse_operator("halfB"), LazyVector.basis(3), 2).coordinate(1) == 0.25
