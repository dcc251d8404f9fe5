"""Graph families used by the benchmarks and tests."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import DomainError
from .graph import Graph, build_graph


def _check_n(n: int, need: int, what: str) -> None:
    if need > n:
        raise DomainError(f"{what} needs {need} vertices but n = {n}")


def clique(t: int, n: int | None = None) -> Graph:
    """K_t on vertices 0..t-1 plus n - t isolated vertices."""
    n = t if n is None else n
    _check_n(n, t, "clique")
    iu, ju = np.triu_indices(t, k=1)
    return build_graph(n, np.stack([iu, ju], axis=1))


def pair_from_index(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Invert the row-major enumeration of pairs u < v of range(n)."""
    idx = np.asarray(idx, dtype=np.int64)
    # float guess for the row, then exact fix-up
    start = lambda u: u * (2 * n - u - 1) // 2
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(np.maximum(b * b - 8.0 * idx, 0.0))) / 2).astype(np.int64)
    u = np.clip(u, 0, max(n - 2, 0))
    u -= start(u) > idx
    u += start(u + 1) <= idx
    v = idx - start(u) + u + 1
    return u, v


def gnm(n: int, m: int, rng: np.random.Generator) -> Graph:
    """Uniform simple graph with exactly m edges."""
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise DomainError(f"gnm: m = {m} not in [0, {total}]")
    idx = rng.choice(total, size=m, replace=False)
    u, v = pair_from_index(idx, n)
    return build_graph(n, np.stack([u, v], axis=1))


def star_forest(n: int, degrees: Sequence[int]) -> Graph:
    """Disjoint stars with the given center degrees, then isolated vertices."""
    degrees = [int(d) for d in degrees]
    if any(d < 0 for d in degrees):
        raise DomainError("star degrees must be nonnegative")
    _check_n(n, sum(d + 1 for d in degrees), "star_forest")
    edges = []
    base = 0
    for d in degrees:
        edges.extend((base, base + i) for i in range(1, d + 1))
        base += d + 1
    return build_graph(n, edges)


def clique_biclique(n: int, n_k: int, n_l: int, n_h: int) -> Graph:
    """Clique on the first n_k vertices plus a complete L-H bipartite graph after it."""
    _check_n(n, n_k + n_l + n_h, "clique_biclique")
    iu, ju = np.triu_indices(n_k, k=1)
    L = np.arange(n_k, n_k + n_l)
    H = np.arange(n_k + n_l, n_k + n_l + n_h)
    lu, hv = np.meshgrid(L, H, indexing="ij")
    edges = np.concatenate([np.stack([iu, ju], axis=1),
                            np.stack([lu.ravel(), hv.ravel()], axis=1)]).astype(np.int64)
    return build_graph(n, edges)


def clique_size_for(m: int) -> int:
    """Smallest t with C(t, 2) >= m."""
    t = int(math.ceil((1 + math.sqrt(1 + 8 * m)) / 2))
    while t > 2 and (t - 1) * (t - 2) // 2 >= m:
        t -= 1
    return t
