"""Hard instances for the lower bound.

A labeled string over {A, K, L, H} describes its reduction graph: a clique
on the K positions plus a complete bipartite graph between the L and H
positions.  :class:`SimulatedGraph` answers degree, neighbor and IS
queries about that graph using only string queries (one full query per
local query, a random-order scan of light queries per IS query), so any
estimator built on :class:`~edgeest.oracle.OracleSession` can run on it
unchanged.  :func:`coupled_distinguish` runs one algorithm on both strings
of a hard pair with identical randomness and reports whether the answer
sequences split.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import BudgetExhausted, DomainError, OutOfRange
from .graph import Graph, build_graph, dump_graph
from .oracle import OracleSession, QueryLedger

ALPHABET = "AKLH"
A, K, L, H = range(4)
DUAL = np.array([A, K, H, L], dtype=np.int8)

# the in-text "d = n_k / 2n" contradicts "sqrt(2 n d) = n_k"; the latter is used
D_RULE = "d = n_k^2 / (2 n)"


class LabeledString:
    """Immutable string over {A, K, L, H} with per-symbol position lists."""

    __slots__ = ("labels", "_pos")

    def __init__(self, labels):
        if isinstance(labels, str):
            try:
                labels = [ALPHABET.index(ch) for ch in labels]
            except ValueError:
                raise DomainError(f"labels must be drawn from {ALPHABET!r}") from None
        arr = np.array(labels, dtype=np.int8)
        if arr.ndim != 1 or (arr.size and (arr.min() < 0 or arr.max() > 3)):
            raise DomainError("labels must be a 1-d sequence of symbol codes 0..3")
        arr.setflags(write=False)
        self.labels = arr
        self._pos = tuple(np.flatnonzero(arr == c) for c in range(4))

    @property
    def n(self) -> int:
        return self.labels.size

    def count(self, symbol: int) -> int:
        return self._pos[symbol].size

    @property
    def counts(self) -> dict[str, int]:
        return {ALPHABET[c]: self.count(c) for c in range(4)}

    def positions(self, symbol: int) -> np.ndarray:
        return self._pos[symbol]

    def __getitem__(self, i: int) -> int:
        return int(self.labels[i])

    def __str__(self) -> str:
        return "".join(ALPHABET[c] for c in self.labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, LabeledString) and np.array_equal(self.labels, other.labels)

    def __hash__(self) -> int:
        return hash(self.labels.tobytes())

    def neighbor_set(self, i: int) -> np.ndarray:
        """U_i: positions labeled with the dual of s(i), excluding i; empty for A."""
        c = self.labels[i]
        if c == A:
            return np.zeros(0, dtype=np.int64)
        pos = self._pos[DUAL[c]]
        return pos[pos != i]

    def degree(self, i: int) -> int:
        c = self.labels[i]
        if c == A:
            return 0
        return self.count(DUAL[c]) - (1 if c == K else 0)

    def edge_count(self) -> int:
        nk = self.count(K)
        return nk * (nk - 1) // 2 + self.count(L) * self.count(H)


def _check_index(s: LabeledString, i) -> int:
    i = int(i)
    if not 0 <= i < s.n:
        raise OutOfRange(f"index {i} not in [0, {s.n})")
    return i


def string_full_query(s: LabeledString, i: int, rng: np.random.Generator):
    """(symbol, |U_i|, uniform member of U_i or None)."""
    i = _check_index(s, i)
    c = s[i]
    deg = s.degree(i)
    if deg == 0:
        return ALPHABET[c], 0, None
    pos = s.positions(int(DUAL[c]))
    j = int(rng.integers(deg))
    if c == K:
        # skip i itself inside the K list
        j += int(pos[j] >= i)
    return ALPHABET[c], deg, int(pos[j])


def string_light_query(s: LabeledString, i: int) -> str:
    return ALPHABET[s[_check_index(s, i)]]


def reduction_graph(s: LabeledString) -> Graph:
    """K-clique plus complete L-H bipartite graph on the positions of ``s``."""
    kp = s.positions(K)
    iu, ju = np.triu_indices(kp.size, k=1)
    lu, hv = np.meshgrid(s.positions(L), s.positions(H), indexing="ij")
    edges = np.concatenate([np.stack([kp[iu], kp[ju]], axis=1),
                            np.stack([lu.ravel(), hv.ravel()], axis=1)]).astype(np.int64)
    return build_graph(s.n, edges)


# -- simulation of graph queries by string queries --

@dataclass
class TraceStep:
    kind: str                 # "deg", "neigh" or "is"
    query: object             # vertex id, or the queried set as a tuple
    string_queries: list      # indices actually queried, in order
    answer: object
    involved: list            # queried indices plus any index returned by a full query

    @property
    def m(self) -> int:
        return len(self.string_queries)


@dataclass
class SimulationTrace:
    steps: list = field(default_factory=list)
    revealed: dict = field(default_factory=dict)   # index -> symbol code
    light_log: list = field(default_factory=list)  # (index, symbol code) per light query

    @property
    def total_string_queries(self) -> int:
        return sum(st.m for st in self.steps)


def _sim_full(trace: SimulationTrace, s: LabeledString, u: int, rng, kind: str):
    sym, deg, nb = string_full_query(s, u, rng)
    c = ALPHABET.index(sym)
    trace.revealed[u] = c
    involved = [u]
    if nb is not None:
        trace.revealed[nb] = int(DUAL[c])
        involved.append(nb)
    answer = deg if kind == "deg" else nb
    trace.steps.append(TraceStep(kind, u, [u], answer, involved))
    return answer


def _sim_is(trace: SimulationTrace, s: LabeledString, S, rng):
    S = np.asarray(S, dtype=np.int64)
    if S.size and (S.min() < 0 or S.max() >= s.n):
        raise OutOfRange(f"IS query outside [0, {s.n})")
    order = rng.permutation(np.unique(S))
    queried = []
    nk = 0
    seen_l = seen_h = False
    independent = True
    for u in order.tolist():
        c = trace.revealed.get(u)
        if c is None:
            c = s[u]
            trace.revealed[u] = c
            trace.light_log.append((u, c))
            queried.append(u)
        if c == K:
            nk += 1
        elif c == L:
            seen_l = True
        elif c == H:
            seen_h = True
        if nk >= 2 or (seen_l and seen_h):
            independent = False
            break
    trace.steps.append(TraceStep("is", tuple(S.tolist()), queried, independent, list(queried)))
    return independent


def simulate_graph_oracle(trace: SimulationTrace, s: LabeledString, graph_query,
                          rng: np.random.Generator):
    """Answer ``("deg", u)``, ``("neigh", u)`` or ``("is", S)`` about G_s via string queries."""
    kind, arg = graph_query
    if kind in ("deg", "neigh"):
        return _sim_full(trace, s, _check_index(s, arg), rng, kind)
    if kind == "is":
        return _sim_is(trace, s, arg, rng)
    raise DomainError(f"unknown graph query kind {kind!r}")


class SimulatedGraph:
    """Oracle source for :class:`OracleSession` backed by string queries.

    The string-side randomness (IS scan order, neighbor picks) comes from
    ``rng``; the algorithm's own randomness stays in the session.
    """

    def __init__(self, s: LabeledString, rng: np.random.Generator):
        self.s = s
        self.n = s.n
        self.rng = rng
        self.trace = SimulationTrace()

    def degree(self, u: int) -> int:
        return simulate_graph_oracle(self.trace, self.s, ("deg", u), self.rng)

    def random_neighbor(self, u: int, rng=None) -> int | None:
        return simulate_graph_oracle(self.trace, self.s, ("neigh", u), self.rng)

    def is_independent(self, vertices) -> bool:
        return simulate_graph_oracle(self.trace, self.s, ("is", vertices), self.rng)


def max_k_involvement(trace: SimulationTrace, s: LabeledString) -> int:
    """Largest number of K positions involved in a single simulated graph query."""
    best = 0
    for st in trace.steps:
        best = max(best, sum(1 for i in set(st.involved) if s[i] == K))
    return best


def full_query_predicate(trace: SimulationTrace, s: LabeledString) -> bool:
    """Some full query hit an L or H position and returned an index."""
    return any(st.kind != "is" and s[st.query] in (L, H) and len(st.involved) == 2
               for st in trace.steps)


def light_query_predicate(trace: SimulationTrace) -> bool:
    """Light queries revealed both an L and an H position."""
    codes = {c for _, c in trace.light_log}
    return L in codes and H in codes


# -- hard pairs --

@dataclass(frozen=True)
class LBParams:
    n: int
    n_k: int
    epsilon: float
    d: float
    n_h: int
    n_ell: int

    @property
    def small_d(self) -> bool:
        """The regime with n_h = 1."""
        return self.n_h == 1

    @property
    def small_d_threshold(self) -> float:
        return 1.0 / (self.epsilon ** (2.0 / 3.0) * self.n ** (1.0 / 3.0))

    @property
    def R(self) -> float:
        return min(self.n_k, math.sqrt(self.n / (self.epsilon * self.n_k))) / 20.0


def lb_params(n: int, n_k: int, epsilon: float) -> LBParams:
    if not 1 <= n_k <= n / 2:
        raise DomainError(f"need 1 <= n_k <= n/2, got n_k = {n_k}, n = {n}")
    if not 0 < epsilon <= 1 / 11:
        raise DomainError(f"need 0 < epsilon <= 1/11, got {epsilon}")
    d = n_k * n_k / (2.0 * n)
    se = math.sqrt(epsilon)
    n_h = math.ceil(se * n ** 0.25 * d ** 0.75)
    if n_h >= 2:
        n_ell = math.ceil(se * n ** 0.75 * d ** 0.25)
    else:
        n_ell = math.ceil(epsilon * n * d)
    return LBParams(n, n_k, epsilon, d, n_h, n_ell)


@dataclass
class HardInstancePair:
    s1: LabeledString
    s2: LabeledString
    params: LBParams
    K: np.ndarray
    H2: np.ndarray
    L2: np.ndarray
    A2: np.ndarray
    seed: object = None

    def metadata(self) -> dict:
        p = self.params
        return {
            "params": asdict(p),
            "d_rule": D_RULE,
            "seed": self.seed,
            "sizes": {"K": int(self.K.size), "H2": int(self.H2.size),
                      "L2": int(self.L2.size), "A2": int(self.A2.size)},
            "m1": self.s1.edge_count(),
            "m2": self.s2.edge_count(),
        }

    def save(self, stem: str | Path) -> list[Path]:
        """Write both reduction graphs in the text format plus a JSON sidecar."""
        stem = Path(stem)
        out = []
        for tag, s in (("g1", self.s1), ("g2", self.s2)):
            path = stem.with_name(f"{stem.name}.{tag}.txt")
            dump_graph(reduction_graph(s), path)
            out.append(path)
        meta = stem.with_name(f"{stem.name}.meta.json")
        meta.write_text(json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n")
        out.append(meta)
        return out


def draw_hard_pair(rng: np.random.Generator, n: int, n_k: int, epsilon: float,
                   seed=None) -> HardInstancePair:
    if n < 16:
        raise DomainError(f"hard pairs need n >= 16, got {n}")
    p = lb_params(n, n_k, epsilon)
    if n_k + p.n_h + p.n_ell > n:
        raise DomainError(f"n_k + n_h + n_ell = {n_k + p.n_h + p.n_ell} exceeds n = {n}")
    perm = rng.permutation(n)
    Kset = np.sort(perm[:n_k])
    # a uniform permutation of the complement gives H2 then L2 uniformly
    H2 = np.sort(perm[n_k:n_k + p.n_h])
    L2 = np.sort(perm[n_k + p.n_h:n_k + p.n_h + p.n_ell])
    A2 = np.sort(perm[n_k + p.n_h + p.n_ell:])
    lab1 = np.full(n, A, dtype=np.int8)
    lab1[Kset] = K
    lab2 = lab1.copy()
    lab2[H2] = H
    lab2[L2] = L
    return HardInstancePair(LabeledString(lab1), LabeledString(lab2), p, Kset, H2, L2, A2, seed)


def draw_edge_count_pair(rng: np.random.Generator, n: int, m: int, epsilon: float) -> HardInstancePair:
    """Pair for target edge count m: n_k = floor(sqrt(2m)), drawn at 3 epsilon.

    Then m(G_s2) >= (1 + 3 epsilon) m(G_s1), so no (1 +- epsilon) estimate fits both.
    """
    return draw_hard_pair(rng, n, int(math.isqrt(2 * m)), 3.0 * epsilon)


# -- coupled runs --

@dataclass
class CoupledResult:
    answer1: object
    answer2: object
    diverged: bool
    queries_used: tuple[QueryLedger, QueryLedger]
    exhausted: tuple[bool, bool]
    first_divergence: int | None


def _run_once(algorithm: Callable, s: LabeledString, master_seed: int, budget: int | None):
    # the same seeds on both sides replay the same random tape
    source = SimulatedGraph(s, np.random.default_rng([master_seed, 1]))
    session = OracleSession(source, rng=np.random.default_rng([master_seed, 0]),
                            budget=budget, record=True)
    try:
        out = algorithm(session)
        exhausted = False
    except BudgetExhausted:
        out = None
        exhausted = True
    return out, session, exhausted


def coupled_distinguish(algorithm: Callable, pair: HardInstancePair, master_seed: int,
                        budget: int | None) -> CoupledResult:
    """Run ``algorithm(session)`` on both strings with identical randomness.

    ``diverged`` is true when the two graph-query answer sequences differ.
    Budget exhaustion ends a run with answer None and is recorded, not raised.
    """
    if budget is not None and budget < 1:
        raise DomainError(f"budget must be >= 1, got {budget}")
    o1, se1, x1 = _run_once(algorithm, pair.s1, master_seed, budget)
    o2, se2, x2 = _run_once(algorithm, pair.s2, master_seed, budget)
    a1, a2 = se1.answers, se2.answers
    first = next((i for i, (p, q) in enumerate(zip(a1, a2)) if p != q), None)
    if first is None and len(a1) != len(a2):
        first = min(len(a1), len(a2))
    return CoupledResult(o1, o2, first is not None, (se1.ledger.snapshot(), se2.ledger.snapshot()),
                         (x1, x2), first)
