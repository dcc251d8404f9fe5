"""Guards that validate a small advice value before it is trusted.

``guard_quantity`` checks that random vertex samples of rate 1/sqrt(m_bar)
do not induce too many edges; ``guard_quality`` checks the same over a
random partition into sqrt(m_bar) buckets, which catches a high-degree
vertex hiding among few edges.  ``small_mbar_guard`` first enumerates up to
``m_bar_star + 1`` edges of the whole graph (rejecting outright when the
graph provably has more than ``m_bar`` edges) and then runs both guards.

Every guard rejects as soon as it sees an edge endpoint of degree above
``m_bar``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._kernel import quantity_rounds as _rounds_kernel
from .enumeration import lazy_edges, transcript_for
from .errors import DomainError
from .estimators import _CHUNK_MEMBERS, SubsetSampler, draw_sets, inclusion_probability
from .graph import subset_keys
from .oracle import OracleSession
from .tuning import PAPER, Tuning, paper_m_bar_star


class Verdict(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"


class Reason(enum.Enum):
    NONE = "none"
    HIGH_DEGREE_WITNESS = "high_degree_witness"
    COUNT_OVERFLOW = "count_overflow"
    DETERMINISTIC_CASE0 = "deterministic_case0"


@dataclass(frozen=True)
class GuardVerdict:
    verdict: Verdict
    reason: Reason = Reason.NONE

    def __post_init__(self):
        if (self.reason is Reason.NONE) != (self.verdict is Verdict.ACCEPT):
            raise ValueError("reason must be NONE exactly when the verdict is ACCEPT")

    @property
    def accepted(self) -> bool:
        return self.verdict is Verdict.ACCEPT

    def __bool__(self) -> bool:
        return self.accepted


ACCEPT = GuardVerdict(Verdict.ACCEPT)
WITNESS = GuardVerdict(Verdict.REJECT, Reason.HIGH_DEGREE_WITNESS)
OVERFLOW = GuardVerdict(Verdict.REJECT, Reason.COUNT_OVERFLOW)
CASE0 = GuardVerdict(Verdict.REJECT, Reason.DETERMINISTIC_CASE0)


@dataclass(frozen=True)
class GuardConfig:
    c: float = 1.0 / 1000.0
    m_bar_star: float | None = None   # None -> max(16 (1 + ln 1/c)^14, 1/c)
    quantity_rounds: float = 96.0

    def __post_init__(self):
        if not 0 < self.c <= 1:
            raise DomainError(f"guard constant c must be in (0, 1], got {self.c}")
        if self.m_bar_star is not None and self.m_bar_star < 1:
            raise DomainError(f"m_bar_star must be >= 1, got {self.m_bar_star}")

    @property
    def mbar_star(self) -> float:
        return paper_m_bar_star(self.c) if self.m_bar_star is None else float(self.m_bar_star)

    @classmethod
    def from_tuning(cls, tuning: Tuning = PAPER) -> "GuardConfig":
        return cls(tuning.guard_c, tuning.m_bar_star, tuning.quantity_rounds)


_FIRST_CHUNK = 1024
# up to 2**12 distinct subsets: one transcript per subset beats one per round
_GROUPED_N = 12


def _check_mbar(m_bar: float) -> None:
    if m_bar < 1:
        raise DomainError(f"guards need m_bar >= 1, got {m_bar}")


def quantity_rounds(c: float, m_bar: float, rounds_const: float = 96.0) -> int:
    return math.ceil(rounds_const / c * math.sqrt(m_bar))


def guard_quantity(session: OracleSession, c: float, m_bar: float,
                   rounds_const: float = 96.0) -> GuardVerdict:
    """Reject if sampled subsets induce too many edges or a high-degree endpoint."""
    _check_mbar(m_bar)
    t = quantity_rounds(c, m_bar, rounds_const)
    p = inclusion_probability(m_bar)
    limit = 1.25 * t
    if session.fast:
        if p >= 1.0:
            return _quantity_whole(session, t, m_bar, limit)
        if session.n <= _GROUPED_N:
            return _quantity_grouped(session, t, p, m_bar, limit)
        return _quantity_batched(session, t, p, m_bar, limit)
    n = session.n
    x = 0
    for _ in range(t):
        S = np.arange(n) if p >= 1.0 else np.flatnonzero(session.rng.random(n) < p)
        for u, v in lazy_edges(session, S):
            du = session.deg(u)
            dv = session.deg(v)
            if du > m_bar or dv > m_bar:
                return WITNESS
            x += 1
            if x >= limit:
                return OVERFLOW
    return ACCEPT


def _quantity_whole(session: OracleSession, t: int, m_bar: float, limit: float) -> GuardVerdict:
    """Every round is the whole vertex set, so every round replays one transcript."""
    g = session.graph
    tr = transcript_for(g, np.arange(g.n, dtype=np.int64))
    mx, costs = tr.arrays(g.degrees)
    m = mx.size
    if m == 0:
        session.charge("is", t)
        return ACCEPT
    need = math.ceil(limit)
    full = (need - 1) // m           # rounds that end below the limit
    bad = np.flatnonzero(mx > m_bar)
    if bad.size and (full > 0 or bad[0] <= need - 1):
        e, verdict = int(bad[0]), WITNESS
    elif full >= t:
        session.charge("is", t * tr.total)
        session.charge("deg", 2 * m * t)
        return ACCEPT
    else:
        session.charge("is", full * tr.total)
        session.charge("deg", 2 * m * full)
        e, verdict = need - 1 - full * m, OVERFLOW
    session.charge("is", int(costs[e]))
    session.charge("deg", 2 * (e + 1))
    return verdict


def _quantity_batched(session: OracleSession, t: int, p: float, m_bar: float, limit: float) -> GuardVerdict:
    """Independent rounds in bulk; dependent rounds run in order by the compiled stream."""
    g = session.graph
    sampler = SubsetSampler(g, p, session.rng)
    per_chunk = sampler.chunk_size()
    # small first chunks so an early rejection stays cheap
    chunk = min(per_chunk, _FIRST_CHUNK)
    x = 0
    left = t
    while left:
        c = min(left, chunk)
        left -= c
        chunk = min(per_chunk, 4 * chunk)
        owner, members = sampler.draw(c)
        batch = session.is_batch(owner, members, c)
        dep = np.flatnonzero(~batch.flags)
        if dep.size == 0:
            batch.take_through(c)
            continue
        verts, vpos, offs, sizes = sampler.complete(owner, members, dep)
        r, code, extra_is, degq, x = _rounds_kernel(
            g.indptr, g.indices, g.degrees, verts, vpos, offs, sizes, x, float(limit), float(m_bar),
            g.pos_scratch)
        batch.take_through(c if r < 0 else int(dep[r]) + 1)
        session.charge("is", int(extra_is))
        session.charge("deg", int(degq))
        if code == 1:
            return WITNESS
        if code == 2:
            return OVERFLOW
    return ACCEPT


def _round_summaries(session, owner, members, nsets, dep, lo, hi, m_bar):
    """Per dependent round: edge count, first witness edge (-1 if none), total IS, costs."""
    g = session.graph
    # identical subsets share one transcript
    keys = subset_keys(owner, members, nsets)
    _, first, inv = np.unique(keys[dep], return_index=True, return_inverse=True)
    inv = inv.ravel()
    gains = np.empty(first.size, dtype=np.int64)
    witness = np.empty(first.size, dtype=np.int64)
    totals = np.empty(first.size, dtype=np.int64)
    costs = []
    for i, j in enumerate(first):
        tr = transcript_for(g, members[lo[j]:hi[j]])
        mx, cs = tr.arrays(g.degrees)
        gains[i] = mx.size
        bad = np.flatnonzero(mx > m_bar)
        witness[i] = bad[0] if bad.size else -1
        totals[i] = tr.total
        costs.append(cs)
    return gains[inv], witness[inv], totals[inv], (costs, inv)


def _quantity_grouped(session: OracleSession, t: int, p: float, m_bar: float, limit: float) -> GuardVerdict:
    n = session.n
    per_chunk = max(1, int(_CHUNK_MEMBERS / max(n * p, 1.0)))
    chunk = min(per_chunk, _FIRST_CHUNK)
    x = 0
    left = t
    while left:
        c = min(left, chunk)
        left -= c
        chunk = min(per_chunk, 4 * chunk)
        owner, members = draw_sets(session.rng, c, n, p)
        batch = session.is_batch(owner, members, c)
        dep = np.flatnonzero(~batch.flags)
        if dep.size == 0:
            batch.take_through(c)
            continue
        lo = np.searchsorted(owner, dep, side="left")
        hi = np.searchsorted(owner, dep, side="right")
        gains, witness, totals, (costs, inv) = _round_summaries(
            session, owner, members, c, dep, lo, hi, m_bar)
        before = x + np.cumsum(gains) - gains
        # edge index at which X would reach the limit inside each round
        over_at = np.maximum(np.ceil(limit - before - 1), 0).astype(np.int64)
        overflow = over_at < gains
        stop = np.flatnonzero((witness >= 0) | overflow)
        if stop.size == 0:
            batch.take_through(c)
            session.charge("is", int((totals - 1).sum()))
            session.charge("deg", 2 * int(gains.sum()))
            x += int(gains.sum())
            continue
        r = int(stop[0])
        batch.take_through(int(dep[r]) + 1)
        session.charge("is", int((totals[:r] - 1).sum()))
        session.charge("deg", 2 * int(gains[:r].sum()))
        w = int(witness[r])
        o = int(over_at[r]) if overflow[r] else None
        if w >= 0 and (o is None or w <= o):
            e, verdict = w, WITNESS
        else:
            e, verdict = o, OVERFLOW
        session.charge("is", int(costs[inv[r]][e]) - 1)
        session.charge("deg", 2 * (e + 1))
        return verdict
    return ACCEPT


def guard_quality(session: OracleSession, c: float, m_bar: float) -> GuardVerdict:
    """Reject if some bucket of a random sqrt(m_bar)-partition shows a bad edge.

    Bucket labels are drawn for every vertex up front and cost no queries.
    """
    _check_mbar(m_bar)
    t = math.ceil(math.sqrt(m_bar))
    n = session.n
    limit = 2.0 * t / c
    buckets = session.rng.integers(t, size=n)
    order = np.argsort(buckets, kind="stable")
    bounds = np.searchsorted(buckets[order], np.arange(t + 1))
    x = 0
    for i in range(t):
        S = order[bounds[i]:bounds[i + 1]]
        for u, v in lazy_edges(session, S):
            du = session.deg(u)
            dv = session.deg(v)
            if du > m_bar or dv > m_bar:
                return WITNESS
            x += 1
            if x >= limit:
                return OVERFLOW
    return ACCEPT


def small_mbar_guard(session: OracleSession, m_bar: float,
                     config: GuardConfig | None = None) -> GuardVerdict:
    """Case-0 enumeration, then the quantity guard, then the quality guard."""
    config = config or GuardConfig()
    _check_mbar(m_bar)
    cap = config.mbar_star
    x = 0
    for _ in lazy_edges(session, np.arange(session.n)):
        x += 1
        if x > cap:
            break
    if x > m_bar:
        return CASE0
    v = guard_quantity(session, config.c, m_bar, config.quantity_rounds)
    if not v:
        return v
    return guard_quality(session, config.c, m_bar)
