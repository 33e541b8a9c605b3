import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from chaoscope.classify import (PREDICATES, ClassifierConfig, ConfigError, DuplicatePoints,
                                classify_pair, classify_point, scrambled_family_check)
from chaoscope.criteria import block_vector
from chaoscope.operators import doubling_map, parse_operator
from chaoscope.orbit import trace
from chaoscope.spaces import LazyTorusPoint, LazyVector, MetricSpec, TorusPoint
from chaoscope.verdict import Status
from zoo import SEQUENCE_ZOO, random_finite

C, R, U = Status.CERTIFIED, Status.REFUTED, Status.UNDECIDED
CFG = ClassifierConfig(N=1 << 12)


@pytest.fixture(scope="module")
def block_verdict():
    return classify_point(parse_operator("2B"), block_vector(2.0), MetricSpec.banach(), CFG)


def test_identity_nothing_scrambled():
    pv = classify_point(parse_operator("I"), LazyVector.basis(1), cfg=ClassifierConfig(N=256))
    assert pv.status("asymptotic") is R and pv.status("proximal") is R
    for key in ("semi_irregular", "irregular", "mean_semi_irregular", "dc2_semi_irregular"):
        assert pv.status(key) is R


def test_block_vector_irregular(block_verdict):
    pv = block_verdict
    assert pv.status("proximal") is C
    assert pv.status("semi_irregular") is C
    assert pv.status("irregular") is C
    ev = pv.evidence["horizon_N"]
    assert ev["liminf_est"] <= 1e-3 and ev["rho_max"] >= 31
    assert pv.consistent()


def test_doubling_dyadic_asymptotic():
    pv = classify_point(doubling_map(), TorusPoint.dyadic([1], 10), cfg=ClassifierConfig(N=256))
    assert pv.status("asymptotic") is C and pv.status("proximal") is C
    assert pv.status("irregular") is U and pv["irregular"].evidence == {"applicable": False}


def test_pair_with_itself_is_asymptotic():
    x = random_finite(np.random.default_rng(3))
    pv = classify_pair(parse_operator("2B"), x, x, cfg=ClassifierConfig(N=256))
    assert pv.status("asymptotic") is C
    assert pv.evidence["horizon_N"]["limsup_est"] == 0.0


def test_doubling_third_not_proximal():
    pv = classify_pair(doubling_map(), TorusPoint.from_fractions([Fraction(1, 3)]),
                       TorusPoint.from_fractions([0]), cfg=ClassifierConfig(N=256))
    assert pv.status("proximal") is R
    assert pv.evidence["horizon_N"]["liminf_est"] == 1 / 3 == pv.evidence["horizon_N"]["limsup_est"]


def test_pair_reduction_matches_witness(block_verdict):
    T = parse_operator("2B")
    w = block_vector(2.0)
    # off the witness support the difference (x + w) - x is w bit for bit
    x = LazyVector.finite([(2, 0.3), (7, -1.25), (50, 4.0)])
    pv = classify_pair(T, x, x + w, MetricSpec.banach(), CFG)
    a, b = pv.to_json(), block_verdict.to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    # overlapping supports agree verdict by verdict
    x = random_finite(np.random.default_rng(4))
    pv = classify_pair(T, x, x + w, MetricSpec.banach(), CFG)
    assert all(pv.status(k) is block_verdict.status(k) for k in PREDICATES)


def test_direct_pair_classification_agrees():
    T = parse_operator("2B")
    x, y = LazyVector.finite([(3, 1.0)]), LazyVector.finite([(3, 1.0), (40, 0.5)])
    cfg = ClassifierConfig(N=256)
    a = classify_pair(T, x, y, cfg=cfg)
    b = classify_pair(T, x, y, cfg=cfg, reduce=False)
    assert all(a.status(k) is b.status(k) for k in PREDICATES)


def test_lazy_torus_semi_irregular():
    pv = classify_point(doubling_map(), LazyTorusPoint("k^2"), cfg=ClassifierConfig(N=1024))
    assert pv.status("semi_irregular") is C
    assert pv.status("asymptotic") is R


def test_family_scaled_witness():
    T = parse_operator("2B")
    w = block_vector(2.0)
    x = LazyVector.basis(1)
    fam = scrambled_family_check(T, [x, x + w, x + 2.0 * w], "LY-delta", MetricSpec.banach(), CFG)
    assert fam.status is C
    assert fam.matrix[0][0] is None and fam.matrix[0][2] is C


def test_family_duplicates_rejected():
    x = LazyVector.basis(2)
    with pytest.raises(DuplicatePoints):
        scrambled_family_check(parse_operator("2B"), [x, LazyVector.finite([(2, 1.0)])])
    with pytest.raises(ConfigError):
        scrambled_family_check(parse_operator("2B"), [x])


def test_family_doubling_refuted():
    pts = [TorusPoint.from_fractions([0]), TorusPoint.from_fractions([Fraction(1, 3)])]
    for kind in ("LY", "LY-δ", "mean", "DC1", "DC2"):
        assert scrambled_family_check(doubling_map(), pts, kind, cfg=ClassifierConfig(N=128)).status is R


def test_family_threads_deterministic(monkeypatch):
    T = parse_operator("2B")
    w = block_vector(2.0)
    pts = [LazyVector.basis(1), LazyVector.basis(1) + w, LazyVector.basis(1) + 3.0 * w, w]
    cfg = ClassifierConfig(N=512)
    one = scrambled_family_check(T, pts, "LY", cfg=cfg).to_json()
    monkeypatch.setenv("CHAOSCOPE_THREADS", "4")
    assert scrambled_family_check(T, pts, "LY", cfg=cfg).to_json() == one


@pytest.mark.parametrize("alpha", [2.0, -0.25, 8.0])
def test_scaling_invariance(alpha, block_verdict):
    T = parse_operator("2B")
    x = block_vector(2.0)
    a, b = trace(T, x, N=1024), trace(T, alpha * x, N=1024)
    assert np.array_equal(b.s, abs(alpha) * a.s)
    cfg = ClassifierConfig(N=CFG.N, eps_small=abs(alpha) * CFG.eps_small,
                           delta_sep=abs(alpha) * CFG.delta_sep)
    assert classify_point(T, alpha * x, MetricSpec.banach(), cfg).status("semi_irregular") is C


def test_scaling_invariance_generic_alpha(rng):
    T = parse_operator("2B")
    x = random_finite(rng)
    a, b = trace(T, x, N=256), trace(T, 0.37 * x, N=256)
    assert np.allclose(b.s, 0.37 * a.s, rtol=1e-14, atol=0)


def dc2_example():
    # s_n > 0.1 on [16^k / 2, 16^k), tiny elsewhere
    return LazyVector.pattern("16^k", "2^(-n/2)", k_min=1)


def test_bounded_metric_bridge():
    cfg = ClassifierConfig(N=4096, N0=64)
    pv = classify_point(parse_operator("2B"), dc2_example(), MetricSpec.bounded(), cfg)
    assert pv.status("dc2_semi_irregular") is C
    assert pv.status("dc1_semi_irregular") is R
    for h in ("horizon_N", "horizon_2N"):
        assert pv.evidence[h]["mean_raw_max"] >= cfg.delta_sep * cfg.eta
    assert pv.consistent()


zoo_names = sorted(SEQUENCE_ZOO)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.sampled_from(zoo_names), st.integers(0, 2 ** 31), st.sampled_from(["banach", "bounded", "frechet"]))
def test_implication_chain(name, seed, metric):
    T = SEQUENCE_ZOO[name]
    x = random_finite(np.random.default_rng(seed), max_index=400)
    m = {"banach": MetricSpec.banach(), "bounded": MetricSpec.bounded(),
         "frechet": MetricSpec.frechet()}[metric]
    pv = classify_point(T, x, m, ClassifierConfig(N=512))
    assert pv.consistent()
    for h in ("horizon_N", "horizon_2N"):
        ev = pv.evidence[h]
        assert ev["liminf_est"] <= ev["limsup_est"]


def test_determinism_bitwise():
    T = parse_operator("2B")
    runs = [json.dumps(classify_point(T, block_vector(2.0), cfg=ClassifierConfig(N=512)).to_json(),
                       sort_keys=True) for _ in range(3)]
    assert runs[0] == runs[1] == runs[2]


def test_verdict_schema(block_verdict):
    out = block_verdict.to_json()
    entry = out["predicates"][0]
    assert set(entry) == {"predicate", "verdict", "evidence", "witnesses"}
    assert entry["verdict"] in ("certified", "refuted", "undecided")
    assert len(out["config_hash"]) == 64
    json.dumps(out)


@pytest.mark.parametrize("kw", [dict(eps_small=0.2), dict(eta=0.5), dict(N=100, N0=100),
                                dict(stability_factor=1)])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        ClassifierConfig(**kw)


def test_config_defaults():
    cfg = ClassifierConfig()
    assert (cfg.N, cfg.N0, cfg.eps_small, cfg.delta_sep, cfg.eta) == (16384, 8192, 1e-3, 0.1, 0.1)
    assert cfg.horizons == ((16384, 8192), (32768, 16384))
    assert cfg.eps_levels[0] == 0.1 and cfg.eps_levels[-1] == 1e-3
