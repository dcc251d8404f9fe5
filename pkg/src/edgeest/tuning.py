"""Algorithm constants.

``PAPER`` carries the constants exactly as published and is the default
everywhere.  With those constants a single run of the top-level estimator
at epsilon = 1/15 issues on the order of 10**11 queries (the high-advice
branch runs at epsilon/1000 with 600/epsilon**2 samples), so every
experiment that has to finish on one machine uses ``DESK``, which keeps
every formula and only shrinks the constants.  Each CSV row records which
profile produced it.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace


def paper_m_bar_star(c: float) -> float:
    return max(16.0 * (1.0 + math.log(1.0 / c)) ** 14, 1.0 / c)


@dataclass(frozen=True)
class Tuning:
    name: str = "paper"
    ll_samples: float = 600.0        # estimate_ll_advice: q = ll_samples / eps^2 * max(1, k / sqrt(m_bar))
    l1h_samples: float = 200.0       # estimate_l1h_advice: t = l1h_samples * n k' / (eps^2 m_bar)
    high_eps_divisor: float = 1000.0
    low_eps_divisor: float = 10.0
    guard_c: float = 1.0 / 1000.0
    quantity_rounds: float = 96.0    # guard_quantity: t = quantity_rounds / c * sqrt(m_bar)
    m_bar_star: float | None = None  # None -> published formula in guard_c
    eps_cap: float = 1.0 / 15.0

    @property
    def mbar_star(self) -> float:
        if self.m_bar_star is not None:
            return float(self.m_bar_star)
        return paper_m_bar_star(self.guard_c)

    @property
    def mbar_star_overridden(self) -> bool:
        return self.m_bar_star is not None

    def with_(self, **changes) -> "Tuning":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["m_bar_star"] = self.mbar_star
        return d


PAPER = Tuning()

DESK = Tuning(
    name="desk",
    ll_samples=1.0,
    l1h_samples=1.0,
    high_eps_divisor=1.0,
    low_eps_divisor=1.0,
    guard_c=0.25,
    quantity_rounds=96.0,
    m_bar_star=64,
)

PROFILES = {"paper": PAPER, "desk": DESK}


def profile(name: str) -> Tuning:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown tuning profile {name!r}; expected one of {sorted(PROFILES)}") from None
