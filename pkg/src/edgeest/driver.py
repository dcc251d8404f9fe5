"""Top-level edge-count estimator.

For each level ``ell`` two advice guesses are tried: a large one
``n^2 / 2^ell`` checked through the high-advice estimator, and a small one
``2^(ell/2)`` checked through the guarded low-advice estimator.  A guess is
kept only when the estimate lands in its acceptance window.  Levels are run
as prefixes ``0..ell_max`` with ``ell_max = 0, 1, 2, ...`` until one prefix
produces a value.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .estimators import estimate_l1h_advice, estimate_ll_advice
from .graph import Graph
from .guards import GuardConfig, small_mbar_guard
from .oracle import OracleSession, QueryLedger
from .tuning import PAPER, Tuning

_ROOT_QUARTER = 2.0 ** -0.25


class Kind(enum.Enum):
    VALUE = "value"
    REJECT = "reject"
    INFINITE = "infinite"


@dataclass(frozen=True)
class EstimateOutcome:
    kind: Kind
    value: float | None = None

    def __post_init__(self):
        if (self.kind is Kind.VALUE) != (self.value is not None):
            raise ValueError("value is present exactly for VALUE outcomes")
        if self.value is not None and self.value < 0:
            raise ValueError("estimates are nonnegative")

    @classmethod
    def of(cls, value: float) -> "EstimateOutcome":
        return cls(Kind.VALUE, float(value))

    @property
    def is_value(self) -> bool:
        return self.kind is Kind.VALUE


REJECT = EstimateOutcome(Kind.REJECT)
INFINITE = EstimateOutcome(Kind.INFINITE)


@dataclass(frozen=True)
class LevelParams:
    ell: int
    m_bar_big: float
    m_bar_small: float

    @classmethod
    def at(cls, n: int, ell: int) -> "LevelParams":
        return cls(ell, n * n / 2.0 ** ell, 2.0 ** (ell / 2.0))


@dataclass(frozen=True)
class LevelDiagnostics:
    ell_big: int
    ell_small: int
    ell_0: int


def level_diagnostics(n: int, m: int) -> LevelDiagnostics:
    """Levels at which the large or the small advice is within a constant of m."""
    if m < 1:
        raise DomainError("level diagnostics need m >= 1")
    r2, r8 = math.sqrt(2) * m, math.sqrt(8) * m
    big = max(int(math.floor(math.log2(n * n / r2))), 0)
    while n * n / 2.0 ** big < r2:
        big -= 1
    while n * n / 2.0 ** (big + 1) >= r2:
        big += 1
    assert r2 <= n * n / 2.0 ** big < r8
    small = max(int(math.ceil(2 * math.log2(r2))), 0)
    while 2.0 ** (small / 2) < r2:
        small += 1
    while small > 0 and 2.0 ** ((small - 1) / 2) >= r2:
        small -= 1
    return LevelDiagnostics(big, small, min(big, small))


def high_threshold(n: int, epsilon: float, m_bar: float) -> float:
    if m_bar >= 0.25 * epsilon * n * n:
        return float(n - 1)
    return math.sqrt(2.0 / epsilon) * math.sqrt(n) * m_bar ** 0.25


def estimate_edges_advice_high(session: OracleSession, epsilon: float, m_bar: float,
                               tuning: Tuning = PAPER) -> float:
    """Estimate for advice m_bar that is not far below m (no guard)."""
    if epsilon <= 0 or m_bar <= 0:
        raise DomainError("advice-high needs epsilon > 0 and m_bar > 0")
    n = session.n
    k = high_threshold(n, epsilon, m_bar)
    ll = estimate_ll_advice(session, epsilon, m_bar, k, tuning)
    if m_bar >= 0.25 * epsilon * n * n:
        return ll
    return ll + estimate_l1h_advice(session, epsilon, m_bar, k, tuning)


def estimate_edges_advice_low(session: OracleSession, epsilon: float, m_bar: float,
                              guard_config: GuardConfig | None = None,
                              tuning: Tuning = PAPER) -> EstimateOutcome:
    """Guarded estimate for small advice; INFINITE when the guard rejects."""
    if epsilon <= 0 or m_bar < 1:
        raise DomainError("advice-low needs epsilon > 0 and m_bar >= 1")
    config = guard_config or GuardConfig.from_tuning(tuning)
    if not small_mbar_guard(session, m_bar, config):
        return INFINITE
    k = min(m_bar, session.n - 1)
    return EstimateOutcome.of(
        estimate_ll_advice(session, epsilon / tuning.low_eps_divisor, m_bar, k, tuning))


def estimate_edges_iteration(session: OracleSession, epsilon: float, ell: int,
                             tuning: Tuning = PAPER,
                             guard_config: GuardConfig | None = None) -> EstimateOutcome:
    lv = LevelParams.at(session.n, ell)
    big = estimate_edges_advice_high(session, epsilon / tuning.high_eps_divisor, lv.m_bar_big, tuning)
    if 0.25 * lv.m_bar_big <= big <= 0.8 * lv.m_bar_big:
        return EstimateOutcome.of(big)
    small = estimate_edges_advice_low(session, epsilon / tuning.low_eps_divisor, lv.m_bar_small,
                                      guard_config, tuning)
    if small.is_value and small.value <= _ROOT_QUARTER * lv.m_bar_small:
        return small
    return REJECT


def estimate_edges_bounded(session: OracleSession, epsilon: float, ell_max: int,
                           tuning: Tuning = PAPER,
                           guard_config: GuardConfig | None = None,
                           trace: list | None = None) -> EstimateOutcome:
    for ell in range(ell_max + 1):
        out = estimate_edges_iteration(session, epsilon, ell, tuning, guard_config)
        if trace is not None:
            trace.append(TraceStep(ell_max, ell, out.kind, out.value, session.ledger.total))
        if out.kind is not Kind.REJECT:
            return out
    return REJECT


@dataclass(frozen=True)
class TraceStep:
    ell_max: int
    ell: int
    kind: Kind
    value: float | None
    queries: int


@dataclass
class EstimateResult:
    estimate: float
    ledger: QueryLedger
    trace: list = field(default_factory=list)
    branch: str = "deepening"


def _estimate(session: OracleSession, epsilon: float, tuning: Tuning,
              guard_config: GuardConfig | None, trace: list | None) -> tuple[float, str]:
    if not 0 < epsilon <= 1:
        raise DomainError(f"epsilon must be in (0, 1], got {epsilon}")
    epsilon = min(epsilon, tuning.eps_cap)
    n = session.n
    if session.is_independent(np.arange(n, dtype=np.int64)):
        return 0.0, "zero"
    if n < 2.0 / epsilon ** 2:
        if session.fast:
            return int(session.deg_many(np.arange(n)).sum()) / 2, "exact"
        return sum(session.deg(u) for u in range(n)) / 2, "exact"
    ell_max = 0
    while True:
        out = estimate_edges_bounded(session, epsilon, ell_max, tuning, guard_config, trace)
        if out.is_value:
            return out.value, "deepening"
        ell_max += 1


def estimate_edges(source, epsilon: float, seed=None, *, tuning: Tuning = PAPER,
                   guard_config: GuardConfig | None = None, budget: int | None = None) -> float:
    """Estimate the edge count within a factor 1 +- epsilon w.p. at least 2/3.

    ``source`` is an :class:`OracleSession` or a :class:`Graph`; in the
    latter case a session is opened with ``seed`` and ``budget``.
    """
    session = _session(source, seed, budget)
    return _estimate(session, epsilon, tuning, guard_config, None)[0]


def estimate_edges_traced(source, epsilon: float, seed=None, *, tuning: Tuning = PAPER,
                          guard_config: GuardConfig | None = None,
                          budget: int | None = None) -> EstimateResult:
    """Like :func:`estimate_edges`, also returning the ledger and deepening trace."""
    session = _session(source, seed, budget)
    trace: list[TraceStep] = []
    value, branch = _estimate(session, epsilon, tuning, guard_config, trace)
    return EstimateResult(value, session.ledger.snapshot(), trace, branch)


def _session(source, seed, budget) -> OracleSession:
    if isinstance(source, OracleSession):
        return source
    if isinstance(source, Graph):
        return OracleSession(source, seed, budget=budget)
    raise TypeError(f"expected Graph or OracleSession, got {type(source).__name__}")
