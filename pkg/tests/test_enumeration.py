import itertools
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from edgeest._kernel import _set_stream
from edgeest.enumeration import (EXTRACT_CONST, Phase, enumerate_bipartite, enumerate_edges,
                                 extract_edge, find_cover, greedy_color, lazy_edges, transcript_for)
from edgeest.families import clique
from edgeest.graph import build_graph, empty_graph
from edgeest.oracle import OracleSession

from conftest import brute_induced, random_edge_list

C3 = 50


def session(g, **kw):
    return OracleSession(g, seed=0, record=True, **kw)


def complete(n):
    return build_graph(n, list(itertools.combinations(range(n), 2)))


def test_extract_adjacent_pair():
    s = session(build_graph(2, [(0, 1)]))
    assert extract_edge(s, [0, 1]) == (0, 1)


def test_extract_independent_costs_one():
    s = session(empty_graph(10))
    assert extract_edge(s, range(10)) is None
    assert s.ledger.is_count == 1


def test_extract_k16_within_bound():
    g = complete(16)
    s = session(g)
    u, v = extract_edge(s, range(16))
    assert g.has_edge(u, v)
    assert s.ledger.is_count <= (1 + 2 * EXTRACT_CONST) * (1 + math.log2(16))


def test_bipartite_examples():
    s = session(build_graph(2, [(0, 1)]))
    got = []
    assert enumerate_bipartite(s, [0], [1], got.append) == 1 and got == [(0, 1)]
    k33 = build_graph(6, [(a, b) for a in range(3) for b in range(3, 6)])
    s = session(k33)
    got = []
    assert enumerate_bipartite(s, [0, 1, 2], [3, 4, 5], got.append) == 9
    assert set(got) == k33.edge_set() and len(got) == 9
    s = session(empty_graph(6))
    assert enumerate_bipartite(s, [0, 1, 2], [3, 4, 5]) == 0
    assert s.ledger.is_count == 1


def test_find_cover_examples():
    s = session(empty_graph(5))
    assert find_cover(s, range(5)) == [] and s.ledger.is_count == 1
    cov = find_cover(session(complete(4)), range(4))
    assert len(cov) == 2 and len({v for e in cov for v in e}) == 4
    p4 = [(0, 1), (1, 2), (2, 3)]
    cov = find_cover(session(build_graph(4, p4)), range(4))
    ends = {v for e in cov for v in e}
    assert 1 <= len(cov) <= 2 and all(u in ends or v in ends for u, v in p4)


def test_greedy_color_examples():
    parts, found = greedy_color(session(build_graph(2, [(0, 1)])), [0, 1])
    assert parts == [[0], [1]] and found == {(0, 1)}
    parts, _ = greedy_color(session(complete(4)), [0, 1, 2, 3])
    assert sorted(map(len, parts)) == [1, 1, 1, 1]
    c4 = build_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    cov = find_cover(session(c4), range(4))
    parts, _ = greedy_color(session(c4), [v for e in cov for v in e])
    assert len(parts) == 2
    for p in parts:
        assert not brute_induced(c4.edges(), p)


def test_stream_examples():
    s = session(empty_graph(8))
    assert list(enumerate_edges(s, range(8))) == [] and s.ledger.total == 1
    assert set(enumerate_edges(session(complete(4)), range(4))) == complete(4).edge_set()


def _check_stream(edges, n, S):
    g = build_graph(n, edges)
    s = session(g)
    stream = enumerate_edges(s, S)
    got = []
    logn = math.log2(max(n, 2))
    for t, e in enumerate(stream, 1):
        got.append(e)
        assert s.ledger.total <= C3 * (1 + t * logn)
        assert e[0] in set(S) and e[1] in set(S)
    assert stream.phase is Phase.DONE
    assert len(got) == len(set(got))
    assert set(got) == brute_induced(edges, S)
    assert all(c <= 3 for c in stream.charge.values())
    assert s.ledger.total <= C3 * (1 + len(got) * logn)
    return stream


def test_random_streams_match_brute_force(rng):
    for _ in range(200):
        n = int(rng.integers(1, 49))
        edges = random_edge_list(rng, n, rng.random())
        S = [int(v) for v in np.flatnonzero(rng.random(n) < rng.random())]
        _check_stream(edges, n, S)


@given(st.integers(2, 24), st.data())
def test_stream_property(n, data):
    pairs = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=60))
    edges = [(u, v) for u, v in pairs if u != v]
    S = data.draw(st.lists(st.integers(0, n - 1), unique=True))
    _check_stream(edges, n, S)


def test_cover_is_matching_and_parts_independent(rng):
    for _ in range(50):
        n = int(rng.integers(2, 40))
        edges = random_edge_list(rng, n, 0.3)
        stream = _check_stream(edges, n, list(range(n)))
        ends = [v for e in stream.cover for v in e]
        assert len(ends) == len(set(ends))
        for p in stream.parts:
            assert not brute_induced(edges, p)


def test_compiled_replay_matches_live_stream(rng):
    # same edges, same order, same IS count at every emission
    for _ in range(300):
        n = int(rng.integers(2, 120))
        edges = random_edge_list(rng, n, rng.random() * rng.random())
        g = build_graph(n, edges)
        S = np.flatnonzero(rng.random(n) < rng.random())
        a = OracleSession(g, record=True)
        live = [(e, a.ledger.is_count) for e in enumerate_edges(a, S)]
        b = OracleSession(g)
        rep = [(e, b.ledger.is_count) for e in lazy_edges(b, S)]
        assert live == rep and a.ledger == b.ledger


def test_padded_set_stream_matches_explicit(rng):
    # members without neighbors are passed only as a size and positions
    for _ in range(200):
        n = int(rng.integers(20, 400))
        core = int(rng.integers(2, 20))
        edges = random_edge_list(rng, core, rng.random())
        g = build_graph(n, edges)
        S = np.flatnonzero(rng.random(n) < rng.random())
        tr = transcript_for(g, S).finish()
        keep = g.degrees[S] > 0
        verts, vpos = S[keep], np.flatnonzero(keep)
        pu, pv, pc, count, total, done = _set_stream(g.indptr, g.indices, verts, vpos, S.size,
                                                      g.pos_scratch, 10 ** 6)
        got = [(int(verts[pu[i]]), int(verts[pv[i]])) for i in range(count)]
        assert done and got == tr.edges and list(pc[:count]) == list(tr.costs)
        assert total == tr.total


def test_large_padded_clique():
    g = clique(12, 5000)
    s = session(g)
    S = np.arange(0, 5000, 2)
    assert set(enumerate_edges(s, S)) == brute_induced(g.edges(), S)
