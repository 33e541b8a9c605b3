"""Shared fixtures and trace invariants checked on every computed trace."""
import numpy as np
import pytest

from chaoscope import orbit
from chaoscope.classify import ClassifierConfig

TRACE_LOG = {"checked": 0, "violations": []}


def check_trace_invariants(tr):
    """Pointwise facts any orbit trace must satisfy.

    The first is the DC2-to-mean bridge ``A_n >= delta * c_delta(n) / n``,
    asserted without slack.
    """
    TRACE_LOG["checked"] += 1
    n = np.arange(1, tr.N + 1)
    d = np.asarray(tr.deltas)[:, None]
    bad = ~(tr.cesaro[None, :] >= d * tr.sep_counts / n[None, :])
    if bad.any():
        i, k = np.argwhere(bad)[0]
        TRACE_LOG["violations"].append((tr.deltas[i], k + 1))
        raise AssertionError(f"A_n < delta c_delta(n)/n at delta={tr.deltas[i]}, n={k + 1}")
    assert np.all(tr.s >= 0)
    # Cesaro means never exceed the running maximum.
    run = np.maximum.accumulate(tr.s)
    assert np.all(tr.cesaro <= run * (1 + 1e-12))
    # counts are nondecreasing in n and nonincreasing in delta
    assert np.all(np.diff(tr.sep_counts, axis=1) >= 0)
    assert np.all(np.diff(tr.sep_counts, axis=0) <= 0)


orbit._TRACE_HOOKS.append(check_trace_invariants)


@pytest.fixture
def small_cfg():
    return ClassifierConfig(N=1 << 10)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


ACCEPTANCE = {}


def pytest_collection_modifyitems(items):
    # run the acceptance suite last so it can audit every trace computed before it
    items.sort(key=lambda it: it.module.__name__ == "test_acceptance")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
