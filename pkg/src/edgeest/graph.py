"""Immutable simple undirected graphs in CSR form, plus the text file format.

Vertices are ``0..n-1``.  Neighbor lists are sorted.  The graph is the
ground truth behind every oracle; algorithms never touch it directly and go
through :class:`edgeest.oracle.OracleSession` instead.
"""
from __future__ import annotations

from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError, OutOfRange, SelfLoop
from ._kernel import independent_sets

# sets up to this size are checked pairwise in pure Python
_SMALL_SET = 12
# cap on gathered neighbor entries per vectorized independence pass
_GATHER_CHUNK = 1 << 22


class Graph:
    """Simple undirected graph with sorted adjacency arrays."""

    __slots__ = ("n", "m", "indptr", "indices", "degrees", "eu", "ev", "_edge_keys", "_scratch", "_adjmask", "_pos")

    def __init__(self, n: int, eu: np.ndarray, ev: np.ndarray):
        # eu < ev elementwise, no duplicates; use build_graph for raw input
        self.n = int(n)
        self.eu = eu
        self.ev = ev
        self.m = int(eu.size)
        src = np.concatenate([eu, ev])
        dst = np.concatenate([ev, eu])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        self.degrees = np.bincount(src, minlength=self.n).astype(np.int64)
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=self.indptr[1:])
        self.indices = dst.astype(np.int64)
        self._edge_keys: set[int] | None = None
        self._scratch = np.zeros(self.n, dtype=bool)
        self._adjmask: np.ndarray | None = None
        self._pos: np.ndarray | None = None

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.eu, other.eu)
                and np.array_equal(self.ev, other.ev))

    def __hash__(self):
        return hash((self.n, self.m))

    # -- ground-truth accessors (no query accounting) --

    def degree(self, u: int) -> int:
        return int(self.degrees[u])

    def adj(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        if u > v:
            u, v = v, u
        return u * self.n + v in self.edge_keys

    @property
    def edge_keys(self) -> set[int]:
        if self._edge_keys is None:
            self._edge_keys = set((self.eu * self.n + self.ev).tolist())
        return self._edge_keys

    def edges(self) -> Iterator[tuple[int, int]]:
        return zip(self.eu.tolist(), self.ev.tolist())

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges())

    def induced_edges(self, vertices: Iterable[int]) -> set[tuple[int, int]]:
        """Brute-force edge set induced on ``vertices``."""
        vs = sorted(set(int(v) for v in vertices))
        return {(u, v) for u, v in combinations(vs, 2) if self.has_edge(u, v)}

    def check_vertices(self, vertices: np.ndarray) -> None:
        if vertices.size and (vertices.min() < 0 or vertices.max() >= self.n):
            bad = vertices[(vertices < 0) | (vertices >= self.n)][0]
            raise OutOfRange(f"vertex {int(bad)} not in [0, {self.n})")

    # -- oracle answers (uncounted; OracleSession does the accounting) --

    def random_neighbor(self, u: int, rng: np.random.Generator) -> int | None:
        d = self.degrees[u]
        if d == 0:
            return None
        return int(self.indices[self.indptr[u] + rng.integers(d)])

    def is_independent(self, vertices) -> bool:
        """True iff no edge has both endpoints in ``vertices``."""
        if self.m == 0:
            return True
        if isinstance(vertices, np.ndarray):
            k = vertices.size
        else:
            k = len(vertices)
        if k < 2:
            return True
        if k <= _SMALL_SET:
            vs = vertices.tolist() if isinstance(vertices, np.ndarray) else list(vertices)
            keys = self.edge_keys
            n = self.n
            for i, a in enumerate(vs):
                for b in vs[i + 1:]:
                    if (a * n + b if a < b else b * n + a) in keys:
                        return False
            return True
        idx = np.asarray(vertices, dtype=np.int64)
        mask = self._scratch
        mask[idx] = True
        try:
            deg = self.degrees[idx]
            total = int(deg.sum())
            if total == 0:
                return True
            if total >= 2 * self.m or total > _GATHER_CHUNK:
                return not bool(np.any(mask[self.eu] & mask[self.ev]))
            nbrs = self._gather(idx, deg, total)
            return not bool(mask[nbrs].any())
        finally:
            mask[idx] = False

    def induced_edge_arrays(self, vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Edges (u < v) induced on a duplicate-free vertex array."""
        idx = np.asarray(vertices, dtype=np.int64)
        idx = idx[self.degrees[idx] > 0]
        deg = self.degrees[idx]
        total = int(deg.sum())
        if idx.size < 2 or total == 0:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty
        mask = self._scratch
        mask[idx] = True
        try:
            nbrs = self._gather(idx, deg, total)
            src = np.repeat(idx, deg)
            keep = mask[nbrs] & (src < nbrs)
            return src[keep], nbrs[keep]
        finally:
            mask[idx] = False

    def _gather(self, idx: np.ndarray, deg: np.ndarray, total: int) -> np.ndarray:
        starts = np.repeat(self.indptr[idx], deg)
        offs = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(deg) - deg, deg)
        return self.indices[starts + offs]

    @property
    def pos_scratch(self) -> np.ndarray:
        """All -1 int64 array of length n; kernels restore it after use."""
        if self._pos is None:
            self._pos = np.full(self.n, -1, dtype=np.int64)
        return self._pos

    @property
    def adjmask(self) -> np.ndarray:
        """Neighborhood bitmasks; only for n <= SMALL_N."""
        if self._adjmask is None:
            mask = np.zeros(self.n, dtype=np.int64)
            one = np.int64(1)
            np.bitwise_or.at(mask, self.eu, np.left_shift(one, self.ev))
            np.bitwise_or.at(mask, self.ev, np.left_shift(one, self.eu))
            self._adjmask = mask
        return self._adjmask

    def independent_flags(self, owner: np.ndarray, members: np.ndarray, nsets: int) -> np.ndarray:
        """Batched independence test.

        ``owner[i]`` is the set id of ``members[i]``; ``owner`` must be
        non-decreasing.  Returns a bool array of length ``nsets``.
        """
        flags = np.ones(nsets, dtype=bool)
        if members.size == 0 or self.m == 0:
            return flags
        n = self.n
        if n <= SMALL_N:
            keys = subset_keys(owner, members, nsets)
            nb = np.zeros(nsets, dtype=np.int64)
            np.bitwise_or.at(nb, owner, self.adjmask[members])
            return (keys & nb) == 0
        return independent_sets(self.indptr, self.indices, owner, members, nsets, n)


SMALL_N = 62


def subset_keys(owner: np.ndarray, members: np.ndarray, nsets: int) -> np.ndarray:
    """Bitmask of each set (vertex ids below SMALL_N); sets must not repeat members."""
    bits = np.left_shift(np.int64(1), members)
    if members.size and members.max() < 52:
        # exact in float64 since members of a set are distinct
        return np.bincount(owner, weights=bits, minlength=nsets).astype(np.int64)
    keys = np.zeros(nsets, dtype=np.int64)
    np.bitwise_or.at(keys, owner, bits)
    return keys


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a simple graph; duplicate pairs (either orientation) collapse."""
    n = int(n)
    if n < 0:
        raise DomainError("vertex count must be nonnegative")
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("edges must be pairs")
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        bad = arr[(arr < 0) | (arr >= n)][0]
        raise OutOfRange(f"endpoint {int(bad)} not in [0, {n})")
    if np.any(arr[:, 0] == arr[:, 1]):
        u = int(arr[arr[:, 0] == arr[:, 1]][0, 0])
        raise SelfLoop(f"self-loop at vertex {u}")
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    keys = np.unique(lo * max(n, 1) + hi)
    return Graph(n, keys // max(n, 1), keys % max(n, 1))


def empty_graph(n: int) -> Graph:
    return build_graph(n, [])


def brute_count(graph: Graph) -> int:
    """Exact edge count by halving the adjacency-length sum."""
    return int(graph.degrees.sum()) // 2


def load_graph(path: str | Path) -> Graph:
    """Read the ``n m`` header format; extra/reversed/duplicate lines are tolerated."""
    lines = [ln.split() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln[0].startswith("#")]
    if not lines or len(lines[0]) != 2:
        raise DomainError(f"{path}: expected header 'n m'")
    n, m = int(lines[0][0]), int(lines[0][1])
    body = lines[1:]
    if len(body) != m:
        raise DomainError(f"{path}: header says {m} edge lines, found {len(body)}")
    return build_graph(n, [(int(a), int(b)) for a, b in body])


def dump_graph(graph: Graph, path: str | Path | None = None) -> str:
    out = [f"{graph.n} {graph.m}"]
    out.extend(f"{u} {v}" for u, v in graph.edges())
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
