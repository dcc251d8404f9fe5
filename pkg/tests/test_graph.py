import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from edgeest.errors import BudgetExhausted, OutOfRange, SelfLoop
from edgeest.graph import brute_count, build_graph, dump_graph, empty_graph, load_graph
from edgeest.oracle import OracleSession, deg_query, is_query, neigh_query

from conftest import brute_induced, random_edge_list


def k(n):
    return build_graph(n, list(itertools.combinations(range(n), 2)))


def test_build_path():
    g = build_graph(3, [(0, 1), (1, 2)])
    assert g.m == 2 and g.degree(1) == 2


def test_build_complete():
    assert k(4).m == 6


def test_duplicates_collapse():
    assert build_graph(5, [(0, 1), (1, 0)]).m == 1


def test_build_errors():
    with pytest.raises(OutOfRange):
        build_graph(3, [(0, 3)])
    with pytest.raises(SelfLoop):
        build_graph(3, [(1, 1)])


@given(st.integers(1, 30), st.lists(st.tuples(st.integers(0, 29), st.integers(0, 29)), max_size=80))
def test_graph_invariants(n, pairs):
    pairs = [(u % n, v % n) for u, v in pairs if u % n != v % n]
    g = build_graph(n, pairs)
    expect = {(min(u, v), max(u, v)) for u, v in pairs}
    assert g.edge_set() == expect
    assert g.m == len(expect) == int(g.degrees.sum()) // 2
    for u in range(n):
        nb = g.adj(u)
        assert np.all(np.diff(nb) > 0)
        assert u not in nb
        for v in nb:
            assert u in g.adj(int(v))


def test_deg_examples():
    s = OracleSession(build_graph(3, [(0, 1), (1, 2)]))
    assert deg_query(s, 1) == 2
    assert OracleSession(build_graph(4, [(0, 1)])).deg(3) == 0
    s4 = OracleSession(k(4))
    assert all(s4.deg(u) == 3 for u in range(4))
    assert s4.ledger.deg_count == 4
    with pytest.raises(OutOfRange):
        s4.deg(4)


def test_neigh_isolated_and_leaf():
    s = OracleSession(build_graph(4, [(0, 1)]), seed=1)
    assert neigh_query(s, 3) is None
    assert all(s.neigh(1) == 0 for _ in range(50))
    assert s.ledger.neigh_count == 51


def test_neigh_uniform_on_star():
    g = build_graph(6, [(0, i) for i in range(1, 6)])
    s = OracleSession(g, seed=7)
    draws = [s.neigh(0) for _ in range(100_000)]
    counts = np.bincount(draws, minlength=6)[1:]
    assert stats.chisquare(counts).pvalue > 0.01


def test_is_examples():
    tri = k(3)
    s = OracleSession(tri)
    assert is_query(s, []) is True
    assert s.is_independent([2]) is True
    assert s.is_independent([0, 1, 2]) is False
    assert s.ledger.is_count == 3
    with pytest.raises(OutOfRange):
        s.is_independent([0, 5])


def test_is_matches_brute_force(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 65))
        edges = random_edge_list(rng, n, rng.random() * 0.3)
        g = build_graph(n, edges)
        S = np.flatnonzero(rng.random(n) < rng.random())
        assert OracleSession(g).is_independent(S) == (not brute_induced(edges, S))


def test_batched_flags_match_single(rng):
    for n in (20, 62, 63, 200):
        edges = random_edge_list(rng, n, 0.05)
        g = build_graph(n, edges)
        owner, members = [], []
        for sid in range(50):
            S = np.flatnonzero(rng.random(n) < 0.2)
            owner += [sid] * S.size
            members += S.tolist()
        flags = g.independent_flags(np.array(owner, dtype=np.int64), np.array(members, dtype=np.int64), 50)
        owner, members = np.array(owner), np.array(members)
        for sid in range(50):
            assert flags[sid] == (not brute_induced(edges, members[owner == sid]))


def test_determinism_and_ledger(rng):
    g = build_graph(30, random_edge_list(rng, 30, 0.2))
    runs = []
    for _ in range(2):
        s = OracleSession(g, seed=99)
        out = [s.neigh(u % 30) for u in range(200)] + [s.deg(u) for u in range(30)]
        out.append(s.is_independent(range(10)))
        runs.append(out)
        assert s.ledger.total == 231 == s.ledger.deg_count + s.ledger.neigh_count + s.ledger.is_count
    assert runs[0] == runs[1]


def test_budget_raises_before_answer():
    s = OracleSession(k(4), budget=2)
    s.deg(0)
    s.is_independent([0, 1])
    with pytest.raises(BudgetExhausted):
        s.deg(1)
    assert s.ledger.total == 2


def test_brute_count_examples():
    assert brute_count(k(4)) == 6
    assert brute_count(empty_graph(5)) == 0
    assert brute_count(build_graph(5, [(i, i + 1) for i in range(4)])) == 4


def test_text_roundtrip(tmp_path, rng):
    g = build_graph(40, random_edge_list(rng, 40, 0.1))
    path = tmp_path / "g.txt"
    dump_graph(g, path)
    assert load_graph(path) == g
    path.write_text("3 3\n0 1\n1 0\n2 1\n")
    assert load_graph(path).m == 2
