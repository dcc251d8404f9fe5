import math

import numpy as np
import pytest

from edgeest.driver import (INFINITE, REJECT, EstimateOutcome, Kind, LevelParams,
                            estimate_edges, estimate_edges_advice_high, estimate_edges_advice_low,
                            estimate_edges_bounded, estimate_edges_iteration, estimate_edges_traced,
                            level_diagnostics)
from edgeest.errors import BudgetExhausted, DomainError
from edgeest.families import clique, gnm
from edgeest.graph import build_graph, empty_graph
from edgeest.oracle import OracleSession
from edgeest.tuning import DESK

EPS = 1 / 15


def frac(pred, trials):
    return sum(bool(pred(s)) for s in range(trials)) / trials


def test_outcome_invariants():
    assert EstimateOutcome.of(3).value == 3.0
    for bad in ((Kind.VALUE, None), (Kind.REJECT, 1.0), (Kind.VALUE, -1.0)):
        with pytest.raises(ValueError):
            EstimateOutcome(*bad)
    assert not REJECT.is_value and not INFINITE.is_value


def test_level_params_exact():
    lv = LevelParams.at(100, 3)
    assert lv.m_bar_big == 10000 / 8 and lv.m_bar_small == 2 ** 1.5


def test_level_diagnostics(rng):
    for _ in range(500):
        n = int(rng.integers(2, 10 ** 5))
        m = int(rng.integers(1, n * (n - 1) // 2 + 1))
        d = level_diagnostics(n, m)
        assert math.sqrt(2) * m <= n * n / 2 ** d.ell_big < math.sqrt(8) * m or d.ell_big == 0
        assert math.sqrt(2) * m <= 2 ** (d.ell_small / 2) < 2 * m
        assert d.ell_0 == min(d.ell_big, d.ell_small)


def test_empty_graph_one_query():
    s = OracleSession(empty_graph(5000), seed=0, record=True)
    assert estimate_edges(s, 0.1) == 0 and s.ledger.total == s.ledger.is_count == 1


def test_exact_branch():
    g = build_graph(3, [(0, 1), (1, 2)])
    s = OracleSession(g, seed=0, record=True)
    res = estimate_edges_traced(s, EPS)
    assert res.estimate == 2 and res.branch == "exact"
    assert res.ledger.deg_count == 3 and res.ledger.is_count == 1


def test_exact_branch_always_exact(rng):
    for _ in range(50):
        n = int(rng.integers(2, 449))
        g = gnm(n, int(rng.integers(1, min(3000, n * (n - 1) // 2) + 1)), rng)
        assert estimate_edges(g, 1.0, seed=0) == g.m


def test_epsilon_domain():
    for eps in (0, -0.1, 1.5):
        with pytest.raises(DomainError):
            estimate_edges(clique(3), eps)


def test_advice_high_examples():
    assert estimate_edges_advice_high(OracleSession(empty_graph(30), seed=0), 0.05, 10) == 0
    g = clique(6)
    ok = frac(lambda s: abs(estimate_edges_advice_high(OracleSession(g, seed=s), 0.05, 15) - 15)
              <= 70 * 0.05 * 15, 200)
    assert ok >= 0.85
    g = gnm(60, 40, np.random.default_rng(1))
    eps = 0.2
    ok = frac(lambda s: estimate_edges_advice_high(OracleSession(g, seed=s), eps, 100 * g.m, DESK)
              <= g.m + 70 * eps * 100 * g.m, 200)
    assert ok >= 0.99


def test_advice_low_examples():
    g = clique(4)
    ok = frac(lambda s: (lambda o: o.is_value and abs(o.value - 6) <= 0.5 * 6)(
        estimate_edges_advice_low(OracleSession(g, seed=s), 0.5, 6)), 200)
    assert ok >= 0.95
    g = clique(20)
    ok = frac(lambda s: (lambda o: not o.is_value or o.value > (1 - 0.5) * 1)(
        estimate_edges_advice_low(OracleSession(g, seed=s), 0.5, 1)), 200)
    assert ok >= 0.99
    with pytest.raises(DomainError):
        estimate_edges_advice_low(OracleSession(g, seed=0), 0.5, 0.5)


def test_iteration_level_zero_rejects_sparse():
    g = clique(4, 1000)
    ok = frac(lambda s: estimate_edges_iteration(OracleSession(g, seed=s), EPS, 0, DESK) == REJECT, 100)
    assert ok >= 0.95


def test_iteration_at_ell0():
    g = clique(12, 1000)
    ell0 = level_diagnostics(g.n, g.m).ell_0
    def good(s):
        o = estimate_edges_iteration(OracleSession(g, seed=s), EPS, ell0, DESK)
        return o.is_value and abs(o.value - g.m) <= EPS * g.m
    assert frac(good, 300) >= 0.9


def test_iteration_small_window_is_one_sided():
    # m_bar_small > 2m: the low-advice value is kept
    g = clique(40, 80)
    n, m = g.n, g.m
    ell = next(l for l in range(60) if 2 ** (l / 2) > 2 * m and n * n / 2 ** l < m / 4)
    ok = frac(lambda s: estimate_edges_iteration(OracleSession(g, seed=s), EPS, ell, DESK).is_value, 50)
    assert ok >= 0.95


def test_iteration_both_windows_miss():
    # m_bar_small < m/2 and m_bar_big < m/4
    g = clique(40, 80)
    n, m = g.n, g.m
    ell = next(l for l in range(60) if 2 ** (l / 2) < m / 2 and n * n / 2 ** l < m / 4)
    ok = frac(lambda s: estimate_edges_iteration(OracleSession(g, seed=s), EPS, ell, DESK) == REJECT, 100)
    assert ok >= 0.95


def test_bounded_examples():
    g = clique(10, 1000)
    ell0 = level_diagnostics(g.n, g.m).ell_0
    tuning = DESK.with_(ll_samples=4, l1h_samples=4)
    def good(s):
        o = estimate_edges_bounded(OracleSession(g, seed=s), EPS, ell0, tuning)
        return o.is_value and abs(o.value - g.m) <= EPS * g.m
    assert frac(good, 300) >= 0.85
    g = clique(3, 1000)
    ok = frac(lambda s: estimate_edges_bounded(OracleSession(g, seed=s), EPS, 0, DESK) == REJECT, 100)
    assert ok >= 0.95


def test_traced_and_deepening_order():
    g = clique(32, 4096)
    res = estimate_edges_traced(g, EPS, seed=7, tuning=DESK)
    assert res.branch == "deepening" and res.trace
    maxes = [st.ell_max for st in res.trace]
    assert maxes == sorted(maxes) and maxes[0] == 0
    for a, b in zip(maxes, maxes[1:]):
        assert b - a in (0, 1)
    assert res.trace[-1].kind is Kind.VALUE and res.trace[-1].value == res.estimate
    assert [st.queries for st in res.trace] == sorted(st.queries for st in res.trace)


def test_padded_clique_accuracy():
    g = clique(32, 4096)
    ok = frac(lambda s: abs(estimate_edges(g, EPS, seed=s, tuning=DESK) - 496) <= EPS * 496, 300)
    assert ok >= 200 / 300


def test_seeded_determinism():
    g = gnm(2000, 3000, np.random.default_rng(2))
    a = estimate_edges_traced(g, EPS, seed=5, tuning=DESK)
    b = estimate_edges_traced(g, EPS, seed=5, tuning=DESK)
    assert a.estimate == b.estimate and a.ledger == b.ledger


def test_budget():
    with pytest.raises(BudgetExhausted):
        estimate_edges(clique(32, 4096), EPS, seed=0, tuning=DESK, budget=50)
