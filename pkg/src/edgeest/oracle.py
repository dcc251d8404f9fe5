"""Query oracles with exact per-call accounting.

An :class:`OracleSession` binds a graph (or any object exposing the same
three oracle answers, such as the string simulator in
:mod:`edgeest.hard_instances`), a seeded ``numpy`` generator and a
:class:`QueryLedger`.  Every degree, neighbor or independent-set call adds
exactly one to one counter; an IS call costs one whatever the set size.

Sessions over a plain :class:`~edgeest.graph.Graph` additionally expose
batched calls (``deg_many``, ``neigh_many``, ``is_batch``).  These charge
the ledger exactly what the equivalent sequence of single calls would
charge; they only exist so the Monte Carlo loops run at numpy speed.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Protocol

import numpy as np

from .errors import BudgetExhausted, OutOfRange
from .graph import Graph


class OracleSource(Protocol):
    n: int

    def degree(self, u: int) -> int: ...

    def random_neighbor(self, u: int, rng: np.random.Generator) -> int | None: ...

    def is_independent(self, vertices) -> bool: ...


@dataclass
class QueryLedger:
    deg_count: int = 0
    neigh_count: int = 0
    is_count: int = 0

    @property
    def total(self) -> int:
        return self.deg_count + self.neigh_count + self.is_count

    def snapshot(self) -> "QueryLedger":
        return QueryLedger(self.deg_count, self.neigh_count, self.is_count)

    def as_dict(self) -> dict[str, int]:
        d = asdict(self)
        d["total"] = self.total
        return d

    def __sub__(self, other: "QueryLedger") -> "QueryLedger":
        return QueryLedger(self.deg_count - other.deg_count,
                           self.neigh_count - other.neigh_count,
                           self.is_count - other.is_count)


_COUNTERS = {"deg": "deg_count", "neigh": "neigh_count", "is": "is_count"}


class OracleSession:
    """Single-threaded handle through which algorithms see a graph.

    ``budget`` caps ``ledger.total``; a call that would exceed it raises
    :class:`BudgetExhausted` before the graph is consulted.  With
    ``record=True`` every answer is appended to ``answers`` as
    ``(kind, answer)`` pairs, which is what coupled runs compare.
    """

    def __init__(self, source: Graph | OracleSource, seed=None, *,
                 rng: np.random.Generator | None = None,
                 budget: int | None = None, record: bool = False):
        self.source = source
        self.graph = source if isinstance(source, Graph) else None
        self.n = int(source.n)
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.ledger = QueryLedger()
        self.budget = budget
        self.answers: list | None = [] if record else None

    @property
    def fast(self) -> bool:
        """Whether batched calls are available (direct graph, no recording)."""
        return self.graph is not None and self.answers is None

    def remaining(self) -> int | None:
        if self.budget is None:
            return None
        return self.budget - self.ledger.total

    def charge(self, kind: str, k: int = 1) -> None:
        """Account ``k`` calls of ``kind``; partial charge then raise on overflow."""
        if k <= 0:
            return
        attr = _COUNTERS[kind]
        if self.budget is not None:
            room = self.budget - self.ledger.total
            if k > room:
                setattr(self.ledger, attr, getattr(self.ledger, attr) + max(room, 0))
                raise BudgetExhausted(self.budget, self.ledger.total)
        setattr(self.ledger, attr, getattr(self.ledger, attr) + k)

    def _check(self, u) -> int:
        u = int(u)
        if not 0 <= u < self.n:
            raise OutOfRange(f"vertex {u} not in [0, {self.n})")
        return u

    def _log(self, kind: str, answer) -> None:
        if self.answers is not None:
            self.answers.append((kind, answer))

    # -- single calls --

    def deg(self, u: int) -> int:
        u = self._check(u)
        self.charge("deg")
        d = self.source.degree(u)
        self._log("deg", d)
        return d

    def neigh(self, u: int) -> int | None:
        """Uniform random neighbor of ``u`` (fresh draw per call), or None if isolated."""
        u = self._check(u)
        self.charge("neigh")
        v = self.source.random_neighbor(u, self.rng)
        self._log("neigh", v)
        return v

    def is_independent(self, vertices) -> bool:
        if isinstance(vertices, np.ndarray):
            arr = vertices
        else:
            arr = np.fromiter((int(v) for v in vertices), dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.n):
            bad = arr[(arr < 0) | (arr >= self.n)][0]
            raise OutOfRange(f"vertex {int(bad)} not in [0, {self.n})")
        self.charge("is")
        ans = self.source.is_independent(arr)
        self._log("is", ans)
        return ans

    # -- batched calls (direct graph only) --

    def deg_many(self, us: np.ndarray) -> np.ndarray:
        us = np.asarray(us, dtype=np.int64)
        self.graph.check_vertices(us)
        self.charge("deg", us.size)
        return self.graph.degrees[us]

    def neigh_many(self, us: np.ndarray) -> np.ndarray:
        """Batched neighbor draws; ``-1`` marks an isolated vertex."""
        g = self.graph
        us = np.asarray(us, dtype=np.int64)
        g.check_vertices(us)
        self.charge("neigh", us.size)
        d = g.degrees[us]
        pick = np.floor(self.rng.random(us.size) * d).astype(np.int64)
        out = np.full(us.size, -1, dtype=np.int64)
        ok = d > 0
        out[ok] = g.indices[g.indptr[us[ok]] + pick[ok]]
        return out

    def is_batch(self, owner: np.ndarray, members: np.ndarray, nsets: int) -> "ISBatch":
        """Evaluate many IS questions at once; each is charged when consumed."""
        return ISBatch(self, self.graph.independent_flags(owner, members, nsets))


class ISBatch:
    """Answers to a batch of IS questions, charged on consumption.

    Callers either consume answers one by one through :meth:`take` or
    account a whole prefix through :meth:`take_through`.
    """

    def __init__(self, session: OracleSession, flags: np.ndarray):
        self.session = session
        self.flags = flags
        self.consumed = 0

    def __len__(self) -> int:
        return self.flags.size

    def take(self, i: int) -> bool:
        self.take_through(i + 1)
        return bool(self.flags[i])

    def take_through(self, stop: int) -> None:
        if stop > self.consumed:
            self.session.charge("is", stop - self.consumed)
            self.consumed = stop


# Functional spellings of the three oracles.

def deg_query(session: OracleSession, u: int) -> int:
    return session.deg(u)


def neigh_query(session: OracleSession, u: int) -> int | None:
    return session.neigh(u)


def is_query(session: OracleSession, vertices) -> bool:
    return session.is_independent(vertices)
