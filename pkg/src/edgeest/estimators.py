"""Advice-based partial estimators for low-low and very-low-to-high edges.

Given an advice ``m_bar`` and a degree threshold ``k``, vertices split into
very-low (deg <= k'), low (k' < deg <= k) and high (deg > k) classes, with
``k' = min(k, m_bar / (eps k))``.  ``estimate_ll_advice`` averages
independent ``sample_ll_sparse`` draws to estimate the low-low edge count;
``estimate_l1h_advice`` samples (vertex, neighbor) pairs to estimate the
very-low-to-high count.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._kernel import ll_batch
from .enumeration import lazy_edges, transcript_for
from .errors import DomainError
from .graph import SMALL_N, Graph, subset_keys
from .oracle import OracleSession
from .tuning import PAPER, Tuning

# cap on set memberships drawn per vectorized chunk
_CHUNK_MEMBERS = 1 << 21


@dataclass(frozen=True)
class Thresholds:
    n: int
    epsilon: float
    m_bar: float
    k: float
    k_prime: float


def _k_prime(k: float, epsilon: float, m_bar: float) -> float:
    if k <= 0:
        return 0.0
    return min(k, m_bar / (epsilon * k))


def threshold_for(n: int, epsilon: float, m_bar: float, k: float | None = None) -> Thresholds:
    """Thresholds for advice ``m_bar``; ``k`` defaults to sqrt(2 n sqrt(m_bar) / eps)."""
    if not 0 < epsilon <= 1:
        raise DomainError(f"epsilon must be in (0, 1], got {epsilon}")
    if m_bar <= 0:
        raise DomainError(f"advice must be positive, got {m_bar}")
    if k is None:
        k = math.sqrt(2.0 * n * math.sqrt(m_bar) / epsilon)
    return Thresholds(n, epsilon, m_bar, float(k), _k_prime(k, epsilon, m_bar))


class VertexClass(enum.Enum):
    L1 = "L1"
    L2 = "L2"
    H = "H"

    @property
    def low(self) -> bool:
        return self is not VertexClass.H


def classify(deg: int, th: Thresholds) -> VertexClass:
    if deg <= th.k_prime:
        return VertexClass.L1
    if deg <= th.k:
        return VertexClass.L2
    return VertexClass.H


class EdgeClassCounts(NamedTuple):
    m_LL: int
    m_L1H: int
    m_L2H: int
    m_HH: int


def edge_class_counts_oracle(graph: Graph, th: Thresholds) -> EdgeClassCounts:
    """Brute-force edge counts per class pair (test-side ground truth)."""
    du = graph.degrees[graph.eu]
    dv = graph.degrees[graph.ev]
    hu, hv = du > th.k, dv > th.k
    l1u, l1v = du <= th.k_prime, dv <= th.k_prime
    ll = int(np.sum(~hu & ~hv))
    hh = int(np.sum(hu & hv))
    mixed = hu ^ hv
    l1h = int(np.sum(mixed & ((hu & l1v) | (hv & l1u))))
    return EdgeClassCounts(ll, l1h, int(np.sum(mixed)) - l1h, hh)


def inclusion_probability(m_bar: float) -> float:
    return min(1.0, 1.0 / math.sqrt(m_bar))


def _draw_set(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    if p >= 1.0:
        return np.arange(n, dtype=np.int64)
    return np.flatnonzero(rng.random(n) < p)


def draw_sets(rng: np.random.Generator, count: int, n: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    """``count`` independent Bernoulli(p) subsets of ``range(n)`` as (owner, member) arrays."""
    if p >= 1.0:
        return (np.repeat(np.arange(count, dtype=np.int64), n),
                np.tile(np.arange(n, dtype=np.int64), count))
    cells = count * n
    if p <= 0.0 or cells == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    if p > 0.05:
        owner, members = np.nonzero(rng.random((count, n)) < p)
        return owner.astype(np.int64), members.astype(np.int64)
    mean = cells * p
    pos = np.cumsum(rng.geometric(p, size=int(mean + 6.0 * math.sqrt(mean) + 16))) - 1
    while pos[-1] < cells:
        more = np.cumsum(rng.geometric(p, size=int(mean / 4 + 16))) + pos[-1]
        pos = np.concatenate([pos, more])
    pos = pos[pos < cells]
    return pos // n, pos % n


class SubsetSampler:
    """Batches of independent Bernoulli(p) vertex subsets, positive-degree vertices first.

    A vertex of degree zero never changes an IS answer, so :meth:`draw`
    returns only the memberships of positive-degree vertices.  For the runs
    that need exact positions, :meth:`complete` draws how many degree-zero
    members fall in each gap between consecutive positive-degree members
    (a binomial count per gap, which has the same law as independent
    inclusion) without materializing them.  Graphs with at most
    ``SMALL_N`` vertices are drawn in one piece.
    """

    def __init__(self, graph: Graph, p: float, rng: np.random.Generator):
        self.graph = graph
        self.p = p
        self.rng = rng
        # small graphs are drawn in one piece
        zero = graph.degrees == 0 if graph.n > SMALL_N else np.zeros(graph.n, dtype=bool)
        self.active = np.flatnonzero(~zero)
        self.n_inert = int(zero.sum())
        # number of degree-zero vertices with a smaller id
        self.inert_rank = np.cumsum(zero) - zero

    def chunk_size(self) -> int:
        return max(1, int(_CHUNK_MEMBERS / max(self.active.size * self.p, 1.0)))

    def draw(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        owner, idx = draw_sets(self.rng, count, self.active.size, self.p)
        return owner, self.active[idx]

    def complete(self, owner: np.ndarray, members: np.ndarray, sets: np.ndarray):
        """Positive-degree members of ``sets`` with their positions in the full set.

        Returns (vertices, positions, offsets, sizes); ``sizes`` counts the
        degree-zero members as well.
        """
        lo = np.searchsorted(owner, sets, side="left")
        hi = np.searchsorted(owner, sets, side="right")
        lens = hi - lo
        offs = np.zeros(sets.size + 1, dtype=np.int64)
        np.cumsum(lens, out=offs[1:])
        pick = np.repeat(lo - offs[:-1], lens) + np.arange(int(offs[-1]))
        verts = members[pick]
        local = np.arange(verts.size, dtype=np.int64) - np.repeat(offs[:-1], lens)
        if self.n_inert == 0:
            return verts, local, offs, lens.astype(np.int64)
        rank = self.inert_rank[verts]
        gaps = rank.copy()
        inner = local > 0
        gaps[inner] -= rank[np.flatnonzero(inner) - 1]
        before = np.cumsum(self.rng.binomial(gaps, self.p))
        # restart the running count at each set
        seg_base = np.repeat(np.concatenate([[0], before])[offs[:-1]], lens)
        inert_before = before - seg_base
        positions = local + inert_before
        last_rank = np.where(lens > 0, rank[np.maximum(offs[1:] - 1, 0)], 0)
        tail = self.rng.binomial(self.n_inert - last_rank, self.p)
        inert_total = np.where(lens > 0, inert_before[np.maximum(offs[1:] - 1, 0)], 0) + tail
        return verts, positions, offs, lens + inert_total


def sample_ll_sparse(session: OracleSession, m_bar: float, k: float) -> int:
    """One draw of X with E[X] = m_LL / m_bar.

    Each vertex joins S independently with probability min(1, 1/sqrt(m_bar));
    the edges induced on S are enumerated and the ones with both endpoint
    degrees at most ``k`` are counted (two degree queries per edge, uncached).
    """
    S = _draw_set(session.rng, session.n, inclusion_probability(m_bar))
    x = 0
    for u, v in lazy_edges(session, S):
        du = session.deg(u)
        dv = session.deg(v)
        if du <= k and dv <= k:
            x += 1
    return x


def ll_sample_count(epsilon: float, m_bar: float, k: float, tuning: Tuning = PAPER) -> int:
    return math.ceil(tuning.ll_samples / epsilon ** 2 * max(1.0, k / math.sqrt(m_bar)))


def estimate_ll_advice(session: OracleSession, epsilon: float, m_bar: float, k: float,
                       tuning: Tuning = PAPER) -> float:
    """m_bar times the mean of q independent ``sample_ll_sparse`` draws."""
    q = ll_sample_count(epsilon, m_bar, k, tuning)
    if session.fast:
        total = sum(int(x.sum()) for x in _ll_draw_chunks(session, q, m_bar, k))
    else:
        total = sum(sample_ll_sparse(session, m_bar, k) for _ in range(q))
    return m_bar * total / q


def sample_ll_sparse_many(session: OracleSession, m_bar: float, k: float, count: int) -> np.ndarray:
    """``count`` independent ``sample_ll_sparse`` draws, charged as the sequential calls."""
    if not session.fast:
        return np.array([sample_ll_sparse(session, m_bar, k) for _ in range(count)], dtype=np.int64)
    return np.concatenate([np.zeros(0, dtype=np.int64), *_ll_draw_chunks(session, count, m_bar, k)])


def _ll_count(graph: Graph, edges, k: float) -> int:
    deg = graph.degrees
    return sum(1 for u, v in edges if deg[u] <= k and deg[v] <= k)


def _ll_draw_chunks(session: OracleSession, q: int, m_bar: float, k: float):
    """Per-draw counts of q sampler draws in chunks, charged exactly as sequential draws."""
    g = session.graph
    n = g.n
    p = inclusion_probability(m_bar)
    if p >= 1.0:
        # every draw is the whole vertex set
        tr = transcript_for(g, np.arange(n, dtype=np.int64)).finish()
        session.charge("is", q * tr.total)
        session.charge("deg", q * 2 * len(tr.edges))
        yield np.full(q, _ll_count(g, tr.edges, k), dtype=np.int64)
        return

    sampler = SubsetSampler(g, p, session.rng)
    per_chunk = sampler.chunk_size()
    left = q
    while left:
        c = min(left, per_chunk)
        left -= c
        draws = np.zeros(c, dtype=np.int64)
        owner, members = sampler.draw(c)
        batch = session.is_batch(owner, members, c)
        batch.take_through(c)
        dep = np.flatnonzero(~batch.flags)
        if dep.size == 0:
            yield draws
            continue
        if n <= SMALL_N:
            # few distinct subsets: group identical draws
            lo = np.searchsorted(owner, dep, side="left")
            hi = np.searchsorted(owner, dep, side="right")
            keys = subset_keys(owner, members, c)[dep]
            _, first, inv, counts = np.unique(keys, return_index=True, return_inverse=True,
                                              return_counts=True)
            vals = np.empty(first.size, dtype=np.int64)
            for i, (j, cnt) in enumerate(zip(first, counts)):
                tr = transcript_for(g, members[lo[j]:hi[j]]).finish()
                session.charge("is", int(cnt) * (tr.total - 1))
                session.charge("deg", int(cnt) * 2 * len(tr.edges))
                vals[i] = _ll_count(g, tr.edges, k)
            draws[dep] = vals[inv.ravel()]
        else:
            verts, vpos, offs, sizes = sampler.complete(owner, members, dep)
            totals, nedges, nll = ll_batch(g.indptr, g.indices, g.degrees, verts, vpos, offs,
                                           sizes, float(k), g.pos_scratch)
            session.charge("is", int(totals.sum()) - dep.size)
            session.charge("deg", 2 * int(nedges.sum()))
            draws[dep] = nll
        yield draws


def l1h_sample_count(n: int, epsilon: float, m_bar: float, k: float, tuning: Tuning = PAPER) -> int:
    kp = _k_prime(k, epsilon, m_bar)
    return math.ceil(tuning.l1h_samples * n * kp / (epsilon ** 2 * m_bar))


def estimate_l1h_advice(session: OracleSession, epsilon: float, m_bar: float, k: float,
                        tuning: Tuning = PAPER) -> float:
    """Unbiased estimate of the very-low-to-high edge count.

    Per sample: a uniform vertex u (free), a random neighbor v, deg(u) and
    deg(v); adds deg(u) when deg(u) <= k' and deg(v) > k.  An isolated u
    skips the deg(v) query and contributes nothing.
    """
    n = session.n
    kp = _k_prime(k, epsilon, m_bar)
    t = l1h_sample_count(n, epsilon, m_bar, k, tuning)
    if t == 0:
        return 0.0
    if session.fast:
        counter = 0
        left = t
        while left:
            c = min(left, _CHUNK_MEMBERS)
            left -= c
            counter += int(l1h_terms(session, kp, k, c).sum())
    else:
        counter = int(l1h_terms(session, kp, k, t).sum())
    return n / t * counter


def l1h_terms(session: OracleSession, k_prime: float, k: float, count: int) -> np.ndarray:
    """Per-sample terms deg(u) * [deg(u) <= k' and deg(v) > k]; n times their mean is unbiased."""
    n = session.n
    rng = session.rng
    if session.fast:
        us = rng.integers(n, size=count)
        vs = session.neigh_many(us)
        du = session.deg_many(us)
        has = vs >= 0
        dv = np.zeros(count, dtype=np.int64)
        dv[has] = session.deg_many(vs[has])
        return np.where(has & (du <= k_prime) & (dv > k), du, 0)
    out = np.zeros(count, dtype=np.int64)
    for i in range(count):
        u = int(rng.integers(n))
        v = session.neigh(u)
        du = session.deg(u)
        if v is None:
            continue
        dv = session.deg(v)
        if du <= k_prime and dv > k:
            out[i] = du
    return out
