import csv
import io
import math
from fractions import Fraction

import numpy as np
import pytest

from chaoscope.criteria import block_vector
from chaoscope.operators import DirectSumVector, doubling_map, parse_operator
from chaoscope.orbit import DEFAULT_DELTAS, pair_trace, trace
from chaoscope.spaces import LazyVector, MetricSpec, TorusPoint
from zoo import SEQUENCE_ZOO, TORUS_ZOO, random_finite, random_torus_point


def same_trace(a, b):
    return (np.array_equal(a.s, b.s) and np.array_equal(a.cesaro, b.cesaro)
            and np.array_equal(a.sep_counts, b.sep_counts))


def test_zero_operator_trace():
    tr = trace(parse_operator({"kind": "zero"}), LazyVector.basis(5), N=64)
    assert np.all(tr.s == 0) and np.all(tr.cesaro == 0)


def test_block_vector_trace_values():
    tr = trace(parse_operator("2B"), block_vector(2.0), N=4096)
    # leading terms: 5/2 at n = 24 and 6/64 at n = 30; the next block adds
    # a coordinate of relative size below 1e-6
    assert tr.s[23] == pytest.approx(2.5, rel=1e-6) and tr.s[23] > 2.5
    assert tr.s[29] == pytest.approx(6 / 64, rel=1e-6)
    # at n = k^2 - 1 the leading coordinate is k/2
    for k in (10, 40, 64):
        assert tr.s[k * k - 2] >= k / 2


def test_contracting_shift_trace():
    tr = trace(parse_operator("0.5B"), LazyVector.basis(10), N=32)
    n = np.arange(1, 33)
    assert np.array_equal(tr.s, np.where(n < 10, 2.0 ** -n, 0.0))


def test_pair_trace_examples():
    T = parse_operator("2B")
    x = random_finite(np.random.default_rng(1))
    assert np.all(pair_trace(T, x, x, N=64).s == 0)
    assert same_trace(pair_trace(T, x, x + LazyVector.basis(1), N=64), trace(T, LazyVector.basis(1), N=64))
    assert np.all(trace(T, LazyVector.basis(1), N=64).s == 0)


def test_doubling_one_third():
    third = TorusPoint.from_fractions([Fraction(1, 3)])
    tr = pair_trace(doubling_map(), third, TorusPoint.from_fractions([0]), N=50)
    assert all(tr.exact(n) == Fraction(1, 3) for n in range(1, 51))


def test_reduction_identity_sequence(rng):
    names = sorted(SEQUENCE_ZOO)
    for i in range(60):
        T = SEQUENCE_ZOO[names[i % len(names)]]
        x, y = random_finite(rng), random_finite(rng)
        for m in (MetricSpec.banach(), MetricSpec.frechet()):
            assert same_trace(pair_trace(T, x, y, m, N=256), trace(T, y - x, m, N=256))


def test_reduction_identity_torus(rng):
    for i in range(30):
        T = TORUS_ZOO[sorted(TORUS_ZOO)[i % 3]]
        x, y = (random_torus_point(rng, T.space.dim, bool(i % 2)) for _ in range(2))
        assert same_trace(pair_trace(T, x, y, N=128), trace(T, y - x, N=128))


def test_direct_pair_path_agrees(rng):
    T = SEQUENCE_ZOO["periodic"]
    for _ in range(10):
        x, y = random_finite(rng), random_finite(rng)
        a = pair_trace(T, x, y, N=256, reduce=False)
        b = pair_trace(T, x, y, N=256)
        assert np.allclose(a.s, b.s, rtol=1e-9, atol=0)
    t = TORUS_ZOO["cat"]
    p, q = random_torus_point(rng, 2), random_torus_point(rng, 2)
    assert same_trace(pair_trace(t, p, q, N=64, reduce=False), pair_trace(t, p, q, N=64))


def test_overflow_saturates_to_inf():
    tr = trace(parse_operator("2B"), LazyVector.basis(3000), N=2048)
    assert math.isfinite(tr.s[1000]) and tr.s[1100] == math.inf
    assert tr.s_log2[1999] == pytest.approx(2000.0)
    assert np.all(np.isinf(tr.cesaro[1100:]))


def test_bounded_metric_means_at_most_one(rng):
    for name in ("2B", "periodic", "diag"):
        tr = trace(SEQUENCE_ZOO[name], random_finite(rng), MetricSpec.bounded(), N=512)
        assert tr.s.max() <= 1 and tr.cesaro.max() <= 1


def test_torus_trace_is_exact():
    tr = trace(doubling_map(), TorusPoint.dyadic([1], 10), N=20)
    assert [tr.exact(n) for n in range(1, 11)] == [Fraction(min(2 ** n, 1024 - 2 ** n), 1024)
                                                   for n in range(1, 10)] + [Fraction(0)]
    assert np.all(tr.s[9:] == 0)


def test_direct_sum_trace():
    T = parse_operator({"kind": "direct_sum", "parts": ["2B", "0.5B"]})
    x = DirectSumVector((LazyVector.basis(3), LazyVector.basis(3)))
    tr = trace(T, x, N=8)
    # l2 combination of 2^n and 2^-n while both components are alive
    assert tr.s[0] == pytest.approx(math.hypot(2.0, 0.5))
    assert np.all(tr.s[2:] == 0)


def test_horizon_must_be_at_least_two():
    with pytest.raises(ValueError):
        trace(parse_operator("2B"), LazyVector.basis(1), N=1)


def test_csv_export(tmp_path):
    tr = trace(parse_operator("0.5B"), LazyVector.basis(4), N=6)
    path = tmp_path / "t.csv"
    tr.write_csv(path)
    rows = list(csv.reader(io.StringIO(path.read_text())))
    assert rows[0][:3] == ["n", "s_n", "A_n"] and len(rows[0]) == 3 + len(DEFAULT_DELTAS)
    assert len(rows) == 7
    assert float(rows[1][1]) == 0.5 and float(rows[2][2]) == 0.375
    assert int(rows[1][3]) == int(0.5 > DEFAULT_DELTAS[0])


def test_counts_use_strict_inequality():
    tr = trace(doubling_map(), TorusPoint.from_fractions([Fraction(1, 8)]), N=4,
               deltas=(0.125, 0.25))
    # s = 1/4, 1/2, 0, 0
    assert tr.count(0.25, 4) == 1 and tr.count(0.125, 4) == 2
