import math

import numpy as np
import pytest

from edgeest.errors import DomainError
from edgeest.estimators import (SubsetSampler, VertexClass, classify, edge_class_counts_oracle,
                                estimate_l1h_advice, estimate_ll_advice, l1h_sample_count, l1h_terms,
                                sample_ll_sparse, sample_ll_sparse_many, threshold_for)
from edgeest.families import clique, gnm, star_forest
from edgeest.graph import build_graph, empty_graph
from edgeest.oracle import OracleSession
from edgeest.tuning import DESK


def star(leaves):
    return star_forest(leaves + 1, [leaves])


def test_threshold_examples():
    th = threshold_for(100, 0.5, 100)
    assert th.k == pytest.approx(math.sqrt(4000))
    assert th.k_prime == pytest.approx(100 / (0.5 * math.sqrt(4000)))
    th = threshold_for(1, 1, 1)
    assert th.k == pytest.approx(math.sqrt(2)) and th.k_prime == pytest.approx(1 / math.sqrt(2))


@pytest.mark.parametrize("args", [(10, 0.0, 5), (10, 1.5, 5), (10, 0.5, 0), (10, 0.5, -1)])
def test_threshold_domain(args):
    with pytest.raises(DomainError):
        threshold_for(*args)


def test_threshold_order(rng):
    for _ in range(500):
        th = threshold_for(int(rng.integers(1, 10 ** 6)), float(rng.uniform(1e-3, 1)),
                           float(rng.uniform(1e-3, 1e9)))
        assert 0 <= th.k_prime <= th.k


def test_classify_examples():
    th = threshold_for(100, 0.5, 100)
    assert classify(0, th) is VertexClass.L1
    assert classify(math.floor(th.k) + 1, th) is VertexClass.H
    assert classify(math.floor(th.k), th) is VertexClass.L2
    eq = threshold_for(100, 0.5, 100, k=1.0)  # k' = min(1, 200) = k
    assert eq.k_prime == eq.k
    assert all(classify(d, eq) is not VertexClass.L2 for d in range(200))


def test_edge_class_counts_examples(rng):
    assert edge_class_counts_oracle(clique(4), threshold_for(4, 1, 6, k=3)) == (6, 0, 0, 0)
    th = threshold_for(6, 1, 4, k=2)  # k' = min(2, 4/2) = 2
    assert th.k_prime == 2
    assert edge_class_counts_oracle(star(5), th) == (0, 5, 0, 0)
    for _ in range(20):
        n = int(rng.integers(2, 60))
        g = gnm(n, int(rng.integers(0, n * (n - 1) // 2 + 1)), rng)
        assert edge_class_counts_oracle(g, threshold_for(n, 0.5, 10, k=n - 1)).m_LL == g.m
        c = edge_class_counts_oracle(g, threshold_for(n, 0.3, float(rng.uniform(1, 50))))
        assert sum(c) == g.m


def test_sample_ll_examples():
    s = OracleSession(empty_graph(30), seed=1, record=True)
    assert all(sample_ll_sparse(s, 4.0, 3) == 0 for _ in range(50))
    s = OracleSession(star(5), seed=1)
    assert not sample_ll_sparse_many(s, 3.0, 2, 2000).any()
    draws = sample_ll_sparse_many(OracleSession(clique(4), seed=2), 6.0, 3, 10 ** 5)
    se = draws.std() / math.sqrt(draws.size)
    assert abs(draws.mean() - 1.0) <= 5 * se


def test_ll_fast_matches_sequential_in_law(rng):
    # compiled batch and per-draw path sample the same distribution and charge the same
    g = gnm(150, 600, rng)
    a = OracleSession(g, seed=3)
    b = OracleSession(g, seed=4, record=True)
    xa = sample_ll_sparse_many(a, 40.0, 30, 6000)
    xb = sample_ll_sparse_many(b, 40.0, 30, 1500)
    se = math.sqrt(xa.var() / xa.size + xb.var() / xb.size)
    assert abs(xa.mean() - xb.mean()) <= 5 * se
    for attr in ("is_count", "deg_count"):
        pa = getattr(a.ledger, attr) / xa.size
        pb = getattr(b.ledger, attr) / xb.size
        assert pa == pytest.approx(pb, rel=0.1)


def test_ll_fast_charge_is_exact_for_full_sets():
    # inclusion probability 1: every draw enumerates the whole graph
    g = clique(5)
    a = OracleSession(g, seed=0)
    b = OracleSession(g, seed=0, record=True)
    assert list(sample_ll_sparse_many(a, 1.0, 4, 7)) == list(sample_ll_sparse_many(b, 1.0, 4, 7))
    assert a.ledger == b.ledger


def test_estimate_ll_examples():
    assert estimate_ll_advice(OracleSession(empty_graph(20), seed=0), 0.5, 4, 3, DESK) == 0
    g = clique(4)
    ok = sum(abs(estimate_ll_advice(OracleSession(g, seed=s), 0.5, 6, 3) - 6) <= 3 for s in range(200))
    assert ok >= 196
    g = build_graph(20, [(i, i + 1) for i in range(10)])
    eps = 0.5
    ok = sum(estimate_ll_advice(OracleSession(g, seed=s), eps, 1e6, 19) <= 10 + eps * 1e6
             for s in range(200))
    assert ok >= 198


def test_l1h_examples():
    g = gnm(40, 200, np.random.default_rng(0))
    assert estimate_l1h_advice(OracleSession(g, seed=0), 0.5, 200, 39) == 0
    assert estimate_l1h_advice(OracleSession(empty_graph(10), seed=0), 0.5, 5, 3) == 0
    th = threshold_for(6, 1, 4, k=2)
    terms = l1h_terms(OracleSession(star(5), seed=5), th.k_prime, th.k, 10 ** 5)
    est = 6 * terms
    assert abs(est.mean() - 5) <= 5 * est.std() / math.sqrt(est.size)


def test_l1h_range_and_cost(rng):
    for _ in range(30):
        n = int(rng.integers(2, 80))
        g = gnm(n, int(rng.integers(0, n * (n - 1) // 4 + 1)), rng)
        eps, mbar = float(rng.uniform(0.2, 1)), float(rng.uniform(1, 100))
        k = float(rng.uniform(1, n))
        th = threshold_for(n, eps, mbar, k=k)
        t = l1h_sample_count(n, eps, mbar, k, DESK)
        s = OracleSession(g, seed=int(rng.integers(1 << 30)), record=True)
        est = estimate_l1h_advice(s, eps, mbar, k, DESK)
        assert 0 <= est <= n * th.k_prime + 1e-9
        assert (est * t / n) == pytest.approx(round(est * t / n), abs=1e-6)
        assert s.ledger.total <= 3 * t and s.ledger.is_count == 0


def test_l1h_fast_matches_sequential_charge():
    g = star_forest(50, [10, 20])
    a = OracleSession(g, seed=9)
    b = OracleSession(g, seed=9, record=True)
    ta, tb = l1h_terms(a, 3, 5, 4000), l1h_terms(b, 3, 5, 4000)
    assert abs(ta.mean() - tb.mean()) <= 5 * math.sqrt((ta.var() + tb.var()) / 4000)
    assert a.ledger.neigh_count == b.ledger.neigh_count == 4000


def test_subset_sampler_positions_match_independent_inclusion():
    # active vertex 3 of 10: its position is Binomial(3, p) inert members ahead of it
    n = 100
    g = build_graph(n, [(30, 70)])
    p = 0.3
    s = SubsetSampler(g, p, np.random.default_rng(1))
    assert list(s.active) == [30, 70]
    owner, members = s.draw(40000)
    has30 = np.unique(owner[members == 30])
    verts, pos, offs, sizes = s.complete(owner, members, has30)
    first = pos[offs[:-1]]
    assert abs(first.mean() - 30 * p) < 0.05
    assert abs(sizes.mean() - (1 + 98 * p + p)) < 0.1
    assert abs(sizes.var() - 99 * p * (1 - p)) < 1.0


def test_determinism():
    g = gnm(300, 2000, np.random.default_rng(5))
    out = [estimate_ll_advice(OracleSession(g, seed=11), 0.5, 500, 40, DESK) for _ in range(2)]
    assert out[0] == out[1]
    out = [estimate_l1h_advice(OracleSession(g, seed=11), 0.5, 500, 10, DESK) for _ in range(2)]
    assert out[0] == out[1]
