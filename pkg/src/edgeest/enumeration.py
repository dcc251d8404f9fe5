"""Edge enumeration using only independent-set queries.

``enumerate_edges`` returns an :class:`EdgeStream`, a lazy iterator whose
t-th distinct edge arrives after O(1 + t log n) IS queries.  It runs in three
phases: a greedy maximal matching whose endpoints cover every induced edge,
a greedy coloring of those endpoints into independent parts, and bipartite
enumeration between every pair of parts (the uncovered remainder of the
input forms the last part).

Every procedure here is deterministic given the graph and the input order,
which is what makes :class:`Transcript` replay exact.
"""
from __future__ import annotations

import enum
from typing import Callable, Iterable, Iterator

import numpy as np

from .graph import Graph
from ._kernel import induced_local, run_stream
from .oracle import OracleSession

Edge = tuple[int, int]

# extract_edge worst case: one check plus two binary searches
EXTRACT_CONST = 2


def _as_array(vertices) -> np.ndarray:
    if isinstance(vertices, np.ndarray):
        return np.unique(vertices.astype(np.int64, copy=False))
    return np.unique(np.fromiter((int(v) for v in vertices), dtype=np.int64))


def _edge(a: int, b: int) -> Edge:
    a, b = int(a), int(b)
    return (a, b) if a < b else (b, a)


def _extract_dependent(session: OracleSession, A: np.ndarray) -> Edge:
    """Find an edge inside ``A``, which the caller knows is not independent.

    First binary search: the shortest dependent prefix ``A[:j]``; its last
    vertex ``x`` has a neighbor in ``A[:j-1]``.  Second binary search: the
    shortest prefix ``B[:i]`` of ``B = A[:j-1]`` that is dependent together
    with ``x``.  At most ``2 * ceil(log2 |A|)`` queries.
    """
    lo, hi = 1, A.size
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if session.is_independent(A[:mid]):
            lo = mid
        else:
            hi = mid
    x = A[hi - 1]
    B = A[:hi - 1]
    lo, hi = 0, B.size
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if session.is_independent(np.append(B[:mid], x)):
            lo = mid
        else:
            hi = mid
    return _edge(B[hi - 1], x)


def extract_edge(session: OracleSession, A) -> Edge | None:
    """An edge with both endpoints in ``A``, or None if ``A`` is independent.

    Uses at most ``1 + 2 * ceil(log2 |A|)`` IS queries; exactly one when
    ``A`` is independent.
    """
    arr = A if isinstance(A, np.ndarray) else np.fromiter((int(v) for v in A), dtype=np.int64)
    if session.is_independent(arr):
        return None
    return _extract_dependent(session, arr)


def bipartite_edges(session: OracleSession, A, B,
                    stack: list | None = None) -> Iterator[Edge]:
    """Yield every A-B edge once; A and B must be disjoint independent sets.

    ``stack`` may be passed in to observe the pending set-pairs.
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.size == 0 or B.size == 0:
        return
    if session.is_independent(np.concatenate([A, B])):
        return
    if stack is None:
        stack = []
    stack.append((A, B))
    while stack:
        a, b = stack.pop()
        if a.size >= 2:
            h = a.size // 2
            halves = [(a[:h], b), (a[h:], b)]
        elif b.size >= 2:
            h = b.size // 2
            halves = [(a, b[:h]), (a, b[h:])]
        else:
            yield _edge(a[0], b[0])
            continue
        dependent = [p for p in halves if not session.is_independent(np.concatenate(p))]
        # LIFO: push the second half first so the first half is processed first
        stack.extend(reversed(dependent))


def enumerate_bipartite(session: OracleSession, A, B,
                        sink: Callable[[Edge], None] | None = None) -> int:
    count = 0
    for e in bipartite_edges(session, A, B):
        if sink is not None:
            sink(e)
        count += 1
    return count


def cover_edges(session: OracleSession, A, *, assume_dependent: bool = False,
                _canonical: bool = False) -> Iterator[Edge]:
    """Greedy disjoint edges whose endpoints cover every edge induced on ``A``."""
    remaining = A if _canonical else _as_array(A)
    known = assume_dependent
    while True:
        if not known and session.is_independent(remaining):
            return
        known = False
        e = _extract_dependent(session, remaining)
        yield e
        remaining = remaining[(remaining != e[0]) & (remaining != e[1])]


def find_cover(session: OracleSession, A) -> list[Edge]:
    return list(cover_edges(session, A))


def coloring_edges(session: OracleSession, cover_vertices: Iterable[int],
                   parts: list[list[int]]) -> Iterator[Edge]:
    """Greedy coloring of ``cover_vertices`` into ``parts`` (filled in place).

    Each vertex joins the first part it is independent with.  Every rejected
    part yields, via extract-edge on ``{u} + part``, an edge incident to ``u``.
    """
    for u in cover_vertices:
        u = int(u)
        for part in parts:
            cand = np.array([u] + part, dtype=np.int64)
            if session.is_independent(cand):
                part.append(u)
                break
            yield _extract_dependent(session, cand)
        else:
            parts.append([u])


def greedy_color(session: OracleSession, cover_vertices) -> tuple[list[list[int]], set[Edge]]:
    parts: list[list[int]] = []
    found = set(coloring_edges(session, cover_vertices, parts))
    return parts, found


class Phase(enum.Enum):
    COVER = "cover"
    COLORING = "coloring"
    CROSS = "cross"
    DONE = "done"


class EdgeStream:
    """Lazy, amortized enumeration of the edges induced on a vertex set.

    Iterating yields each induced edge exactly once as ``(u, v)`` with
    ``u < v``.  ``charge`` counts how often each edge was discovered across
    phases (never more than three).
    """

    def __init__(self, session: OracleSession, A, *, assume_dependent: bool = False,
                 _canonical: bool = False):
        self.session = session
        self.vertices = A if _canonical else _as_array(A)
        self.phase = Phase.COVER
        self.cover: list[Edge] = []
        self.parts: list = []
        self.pending: list = []
        self.emitted = 0
        self.charge: dict[Edge, int] = {}
        self._it = self._run(assume_dependent)

    def __iter__(self) -> "EdgeStream":
        return self

    def __next__(self) -> Edge:
        return next(self._it)

    def _fresh(self, e: Edge) -> bool:
        c = self.charge.get(e, 0) + 1
        self.charge[e] = c
        if c == 1:
            self.emitted += 1
            return True
        return False

    def _run(self, assume_dependent: bool) -> Iterator[Edge]:
        session = self.session
        for e in cover_edges(session, self.vertices, assume_dependent=assume_dependent,
                             _canonical=True):
            self.cover.append(e)
            self._fresh(e)
            yield e
        if not self.cover:
            self.phase = Phase.DONE
            return

        self.phase = Phase.COLORING
        order = [v for e in self.cover for v in e]
        colored: list[list[int]] = []
        self.parts = colored
        for e in coloring_edges(session, order, colored):
            if self._fresh(e):
                yield e

        self.phase = Phase.CROSS
        covered = np.array(order, dtype=np.int64)
        rest = np.delete(self.vertices, np.searchsorted(self.vertices, covered))
        parts = [np.array(p, dtype=np.int64) for p in colored]
        if rest.size:
            parts.append(rest)
        self.parts = parts
        for j in range(len(parts)):
            for i in range(j):
                self.pending = []
                for e in bipartite_edges(session, parts[i], parts[j], self.pending):
                    if self._fresh(e):
                        yield e
        self.pending = []
        self.phase = Phase.DONE


def enumerate_edges(session: OracleSession, A, *, assume_dependent: bool = False) -> EdgeStream:
    """Lazy stream of the edges induced on ``A``.

    With ``assume_dependent`` the caller has already paid for the opening
    IS query on ``A`` and learned it is not independent.
    """
    return EdgeStream(session, A, assume_dependent=assume_dependent)


class Transcript:
    """A recorded EdgeStream run on ``vertices``, computed off the books.

    ``costs[i]`` is the number of IS queries spent when ``edges[i]`` was
    emitted; ``total`` is the final count once the stream is drained.
    The run is computed by a compiled replica of :class:`EdgeStream` on the
    induced subgraph relabeled by position (which preserves order, so the
    questions asked are the same).  It is extended only as far as a
    consumer asks, rerunning with a doubled edge cap when needed.
    """

    __slots__ = ("edges", "costs", "total", "_vertices", "_csr", "_arrays")

    def __init__(self, graph: Graph, vertices: np.ndarray):
        self._vertices = vertices
        self._csr = induced_local(graph.indptr, graph.indices, vertices, graph.pos_scratch)
        self.edges: list[Edge] = []
        self.costs: list[int] = []
        self.total: int | None = None
        self._arrays = None

    def ensure(self, i: int) -> bool:
        """Materialize edge ``i``; False if the stream has fewer edges."""
        if i < len(self.edges):
            return True
        if self.total is not None:
            return False
        cap = int(min(max(2 * len(self.edges), i + 1, 16), 1 << 62))
        vs = self._vertices
        indptr, indices = self._csr
        pu, pv, pc, count, total, done = run_stream(vs.size, indptr, indices, cap)
        self.edges = list(zip(vs[pu[:count]].tolist(), vs[pv[:count]].tolist()))
        self.costs = pc[:count].tolist()
        if done:
            self.total = int(total)
            self._vertices = self._csr = None
        return i < len(self.edges)

    def finish(self) -> "Transcript":
        self.ensure(1 << 62)
        return self

    def arrays(self, degrees: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(max endpoint degree per edge, IS cost per edge) of the drained run."""
        if self._arrays is None:
            self.finish()
            e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
            self._arrays = (np.maximum(degrees[e[:, 0]], degrees[e[:, 1]]),
                            np.asarray(self.costs, dtype=np.int64))
        return self._arrays


_MEMO_CAP = 200_000


def transcript_for(graph: Graph, vertices: np.ndarray) -> Transcript:
    """Memoized transcript of ``enumerate_edges`` on ``vertices`` (sorted, unique)."""
    memo = _memo(graph)
    key = vertices.tobytes()
    t = memo.get(key)
    if t is None:
        if len(memo) >= _MEMO_CAP:
            memo.clear()
        t = memo[key] = Transcript(graph, vertices)
    return t


_memos: dict[int, tuple[Graph, dict]] = {}


def _memo(graph: Graph) -> dict:
    slot = _memos.get(id(graph))
    if slot is None or slot[0] is not graph:
        if len(_memos) > 64:
            _memos.clear()
        slot = _memos[id(graph)] = (graph, {})
    return slot[1]


def replay(session: OracleSession, transcript: Transcript, paid: int = 0) -> Iterator[Edge]:
    """Yield the transcript's edges, charging ``session`` as the live run would.

    ``paid`` IS queries (the opening independence check) were already charged.
    """
    charged = paid
    i = 0
    while transcript.ensure(i):
        cost = transcript.costs[i]
        session.charge("is", cost - charged)
        charged = cost
        yield transcript.edges[i]
        i += 1
    session.charge("is", transcript.total - charged)


def lazy_edges(session: OracleSession, vertices, *, assume_dependent: bool = False) -> Iterator[Edge]:
    """Induced edges of ``vertices`` with exact accounting, replayed when possible."""
    arr = _as_array(vertices)
    if session.fast:
        return replay(session, transcript_for(session.graph, arr), 1 if assume_dependent else 0)
    return enumerate_edges(session, arr, assume_dependent=assume_dependent)
