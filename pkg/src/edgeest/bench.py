"""Seeded experiment harness: graph families, trial loops and CSV output.

Trial ``i`` of an experiment uses seed ``master_seed + i``.  Records are
written in trial order whatever order the workers finish in, and floats are
printed with 9 significant digits, so equal configurations give byte-equal
CSV files.  Wall time is kept on the records but only written when
``timing`` is on, since it is the one column that is not reproducible.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import families
from .driver import estimate_edges, estimate_edges_traced
from .errors import BudgetExhausted, DomainError
from .graph import Graph, brute_count, empty_graph, load_graph
from .hard_instances import coupled_distinguish, draw_hard_pair, lb_params, reduction_graph
from .oracle import OracleSession
from .tuning import Tuning, paper_m_bar_star, profile

FAMILIES = ("empty", "clique", "gnm", "star_forest", "clique_biclique", "hard_pair", "file")

CSV_COLUMNS = (
    "trial", "seed", "family", "n", "true_m", "epsilon", "estimate", "rel_error", "success",
    "status", "deg_queries", "neigh_queries", "is_queries", "total_queries", "branch",
    "profile", "m_bar_star", "deviation",
)
TIMING_COLUMN = "wall_s"

LOWERBOUND_COLUMNS = (
    "trial", "seed", "n", "n_k", "n_h", "n_ell", "m1", "m2", "budget", "diverged",
    "first_divergence", "queries1", "queries2", "exhausted1", "exhausted2",
)


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "nan" if math.isnan(x) else f"{float(x):.9g}"
    return "" if x is None else str(x)


@dataclass
class ExperimentConfig:
    family: str = "clique"
    n: int = 4096
    m: int = 0                       # gnm
    t: int = 32                      # clique size
    degrees: tuple = ()              # star_forest centers
    n_k: int = 0                     # clique_biclique / hard_pair
    n_l: int = 0
    n_h: int = 0
    side: int = 2                    # hard_pair: which string's graph
    path: str = ""                   # file
    epsilon: float = 1.0 / 15.0
    trials: int = 10
    master_seed: int = 0
    profile: str = "paper"
    m_bar_star: float | None = None  # overrides the profile's value
    budget: int | None = None
    out: str = ""
    timing: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if not 0 < self.epsilon <= 1:
            raise DomainError(f"epsilon must be in (0, 1], got {self.epsilon}")
        if self.m_bar_star is not None and self.m_bar_star < 1:
            raise DomainError("m_bar_star must be >= 1")
        if self.budget is not None and self.budget < 1:
            raise DomainError("budget must be >= 1")
        self.degrees = tuple(int(d) for d in self.degrees)

    def tuning(self) -> Tuning:
        tun = profile(self.profile)
        if self.m_bar_star is not None:
            tun = tun.with_(m_bar_star=float(self.m_bar_star))
        return tun

    def deviation(self) -> str:
        """Empty for the published constants, else the deviating settings."""
        tun = self.tuning()
        flags = []
        if tun.name != "paper":
            flags.append(f"profile={tun.name}")
        if tun.mbar_star != paper_m_bar_star(tun.guard_c):
            flags.append(f"m_bar_star={fmt(tun.mbar_star)}")
        return ";".join(flags)

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        """Build from string values (key=value file or CLI), coercing by field type."""
        known = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in data.items():
            key = key.replace("-", "_")
            if key == "seed":
                key = "master_seed"
            elif key in ("eps", "epsilon"):
                key = "epsilon"
            elif key == "mbar_star":
                key = "m_bar_star"
            if key not in known:
                raise DomainError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(key, raw)
        return cls(**kwargs)


_INT_KEYS = {"n", "m", "t", "n_k", "n_l", "n_h", "side", "trials", "master_seed", "budget", "workers"}
_FLOAT_KEYS = {"epsilon", "m_bar_star"}


def _coerce(key: str, raw):
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    if key in ("budget", "m_bar_star") and raw.lower() in ("", "none"):
        return None
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        if "/" in raw:
            a, b = raw.split("/", 1)
            return float(a) / float(b)
        return float(raw)
    if key == "degrees":
        return tuple(int(x) for x in raw.replace(",", " ").split())
    if key == "timing":
        return raw.lower() in ("1", "true", "yes", "on")
    return raw


def read_config_file(path: str | Path) -> dict:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def gen_family(config: ExperimentConfig, rng: np.random.Generator) -> Graph:
    c = config
    if c.family == "empty":
        return empty_graph(c.n)
    if c.family == "clique":
        return families.clique(c.t, c.n)
    if c.family == "gnm":
        return families.gnm(c.n, c.m, rng)
    if c.family == "star_forest":
        return families.star_forest(c.n, c.degrees)
    if c.family == "clique_biclique":
        return families.clique_biclique(c.n, c.n_k, c.n_l, c.n_h)
    if c.family == "hard_pair":
        pair = draw_hard_pair(rng, c.n, c.n_k, c.epsilon)
        return reduction_graph(pair.s1 if c.side == 1 else pair.s2)
    if c.family == "file":
        return load_graph(c.path)
    raise DomainError(f"unknown family {c.family!r}")


@dataclass
class TrialRecord:
    trial: int
    seed: int
    family: str
    n: int
    true_m: int
    epsilon: float
    estimate: float
    rel_error: float
    success: bool
    status: str
    deg_queries: int
    neigh_queries: int
    is_queries: int
    total_queries: int
    branch: str
    profile: str
    m_bar_star: float
    deviation: str
    wall_s: float = 0.0

    def row(self, timing: bool) -> list[str]:
        vals = [fmt(getattr(self, k)) for k in CSV_COLUMNS]
        if timing:
            vals.append(fmt(self.wall_s))
        return vals


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list
    summary: dict = field(default_factory=dict)


def _one_trial(graph: Graph, true_m: int, config: ExperimentConfig, trial: int) -> TrialRecord:
    seed = config.master_seed + trial
    tun = config.tuning()
    t0 = time.perf_counter()
    session = OracleSession(graph, seed, budget=config.budget)
    try:
        res = estimate_edges_traced(session, config.epsilon, tuning=tun)
        est, branch, status = res.estimate, res.branch, "ok"
    except BudgetExhausted:
        est, branch, status = math.nan, "", "budget_exhausted"
    wall = time.perf_counter() - t0
    led = session.ledger
    if status == "ok":
        err = abs(est - true_m) / true_m if true_m else (0.0 if est == 0 else math.inf)
        success = abs(est - true_m) <= config.epsilon * true_m
    else:
        err, success = math.nan, False
    return TrialRecord(trial, seed, config.family, graph.n, true_m, config.epsilon, est, err,
                       bool(success), status, led.deg_count, led.neigh_count, led.is_count,
                       led.total, branch, tun.name, tun.mbar_star, config.deviation(), wall)


def _trial_star(args):
    return _one_trial(*args)


def summarize(records: list, true_m: int) -> dict:
    totals = np.array([r.total_queries for r in records], dtype=float)
    return {
        "trials": len(records),
        "true_m": true_m,
        "success_rate": float(np.mean([r.success for r in records])),
        "median_total_queries": float(np.median(totals)),
        "mean_total_queries": float(np.mean(totals)),
        "budget_exhausted": sum(r.status != "ok" for r in records),
    }


def run_experiment(config: ExperimentConfig, graph: Graph | None = None) -> ExperimentResult:
    """Run ``config.trials`` seeded trials on one graph and optionally write the CSV."""
    if graph is None:
        graph = gen_family(config, np.random.default_rng(config.master_seed))
    true_m = brute_count(graph)
    jobs = [(graph, true_m, config, i) for i in range(config.trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            records = list(pool.map(_trial_star, jobs))
    else:
        records = [_one_trial(*job) for job in jobs]
    result = ExperimentResult(config, records, summarize(records, true_m))
    if config.out:
        write_csv(result, config.out)
    return result


def csv_text(result: ExperimentResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = list(CSV_COLUMNS) + ([TIMING_COLUMN] if result.config.timing else [])
    w.writerow(header)
    for r in result.records:
        w.writerow(r.row(result.config.timing))
    return buf.getvalue()


def write_csv(result: ExperimentResult, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(result))
    return path


# -- lower-bound distinguishing experiment --

@dataclass
class LowerBoundConfig:
    n: int = 1 << 14
    n_k: int = 1 << 7
    epsilon: float = 1.0 / 11.0
    trials: int = 500
    master_seed: int = 0
    budget: int | None = None        # None -> max(1, floor(R / 10))
    profile: str = "desk"
    estimator_eps: float = 1.0 / 15.0
    out: str = ""

    def resolved_budget(self) -> int:
        if self.budget is not None:
            return self.budget
        return max(1, math.floor(lb_params(self.n, self.n_k, self.epsilon).R / 10))


def run_lowerbound(config: LowerBoundConfig) -> tuple[list[dict], dict]:
    """Coupled runs of the estimator on fresh hard pairs; one row per pair."""
    tun = profile(config.profile)
    budget = config.resolved_budget()

    def algorithm(session):
        return estimate_edges(session, config.estimator_eps, tuning=tun)

    rows = []
    for i in range(config.trials):
        seed = config.master_seed + i
        pair = draw_hard_pair(np.random.default_rng(seed), config.n, config.n_k, config.epsilon, seed)
        res = coupled_distinguish(algorithm, pair, seed, budget)
        rows.append({
            "trial": i, "seed": seed, "n": config.n, "n_k": config.n_k,
            "n_h": pair.params.n_h, "n_ell": pair.params.n_ell,
            "m1": pair.s1.edge_count(), "m2": pair.s2.edge_count(), "budget": budget,
            "diverged": res.diverged, "first_divergence": res.first_divergence,
            "queries1": res.queries_used[0].total, "queries2": res.queries_used[1].total,
            "exhausted1": res.exhausted[0], "exhausted2": res.exhausted[1],
        })
    rate = float(np.mean([r["diverged"] for r in rows]))
    p = lb_params(config.n, config.n_k, config.epsilon)
    summary = {"trials": len(rows), "budget": budget, "R": p.R, "divergence_rate": rate,
               "se": math.sqrt(max(rate * (1 - rate), 1e-12) / len(rows)),
               "bound_q_over_R": budget / p.R}
    if config.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(LOWERBOUND_COLUMNS)
        for r in rows:
            w.writerow([fmt(r[k]) for k in LOWERBOUND_COLUMNS])
        Path(config.out).parent.mkdir(parents=True, exist_ok=True)
        Path(config.out).write_text(buf.getvalue())
    return rows, summary
