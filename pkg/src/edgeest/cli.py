"""Command line: ``edgeest {gen,estimate,bench,lowerbound}``.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bench import (ExperimentConfig, LowerBoundConfig, _coerce, csv_text, gen_family, read_config_file,
                    run_experiment, run_lowerbound)
from .driver import estimate_edges_traced
from .errors import DomainError, EdgeEstError
from .graph import brute_count, dump_graph
from .oracle import OracleSession

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# flag name -> config key
_GRAPH_FLAGS = {
    "family": str, "n": int, "m": int, "t": int, "degrees": str,
    "nk": int, "nl": int, "nh": int, "side": int, "path": str,
}
_KEY = {"nk": "n_k", "nl": "n_l", "nh": "n_h"}


def _add_graph_flags(p: argparse.ArgumentParser) -> None:
    for name, typ in _GRAPH_FLAGS.items():
        p.add_argument(f"--{name}", type=typ)
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="flat key=value file; flags override it")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", type=str, help="epsilon, e.g. 0.0667 or 1/15")
    p.add_argument("--profile", choices=("paper", "desk"))
    p.add_argument("--mbar-star", type=float, dest="mbar_star")
    p.add_argument("--budget", type=int)


def _mapping(args, keys) -> dict:
    data = read_config_file(args.config) if getattr(args, "config", None) else {}
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            data[_KEY.get(k, k)] = v if isinstance(v, str) else str(v)
    return data


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="edgeest", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a family graph in the text format")
    _add_graph_flags(g)
    g.add_argument("--out", help="output path (stdout if omitted)")

    e = sub.add_parser("estimate", help="one estimation run; prints estimate and ledger")
    _add_graph_flags(e)
    _add_run_flags(e)

    b = sub.add_parser("bench", help="seeded trials; writes the CSV")
    _add_graph_flags(b)
    _add_run_flags(b)
    b.add_argument("--trials", type=int)
    b.add_argument("--workers", type=int)
    b.add_argument("--timing", action="store_true", default=None)
    b.add_argument("--out")

    lb = sub.add_parser("lowerbound", help="coupled runs on hard pairs; writes divergence CSV")
    lb.add_argument("--n", type=int, default=1 << 14)
    lb.add_argument("--nk", type=int, default=1 << 7)
    lb.add_argument("--eps", type=str, default="1/11")
    lb.add_argument("--trials", type=int, default=500)
    lb.add_argument("--seed", type=int, default=0)
    lb.add_argument("--budget", type=int)
    lb.add_argument("--profile", choices=("paper", "desk"), default="desk")
    lb.add_argument("--out")
    return p


_RUN_KEYS = list(_GRAPH_FLAGS) + ["seed", "eps", "profile", "mbar_star", "budget"]


def _cmd_gen(args) -> int:
    cfg = ExperimentConfig.from_mapping(_mapping(args, list(_GRAPH_FLAGS) + ["seed"]))
    g = gen_family(cfg, np.random.default_rng(cfg.master_seed))
    text = dump_graph(g, args.out) if args.out else dump_graph(g)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_estimate(args) -> int:
    cfg = ExperimentConfig.from_mapping(_mapping(args, _RUN_KEYS))
    g = gen_family(cfg, np.random.default_rng(cfg.master_seed))
    session = OracleSession(g, cfg.master_seed, budget=cfg.budget)
    res = estimate_edges_traced(session, cfg.epsilon, tuning=cfg.tuning())
    out = {"estimate": res.estimate, "true_m": brute_count(g), "branch": res.branch,
           "ledger": res.ledger.as_dict(), "deviation": cfg.deviation()}
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def _cmd_bench(args) -> int:
    cfg = ExperimentConfig.from_mapping(
        _mapping(args, _RUN_KEYS + ["trials", "workers", "timing", "out"]))
    result = run_experiment(cfg)
    if not cfg.out:
        sys.stdout.write(csv_text(result))
    print(json.dumps(result.summary, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def _cmd_lowerbound(args) -> int:
    cfg = LowerBoundConfig(n=args.n, n_k=args.nk, epsilon=_coerce("epsilon", args.eps),
                           trials=args.trials, master_seed=args.seed, budget=args.budget,
                           profile=args.profile, out=args.out or "")
    _, summary = run_lowerbound(cfg)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


_COMMANDS = {"gen": _cmd_gen, "estimate": _cmd_estimate, "bench": _cmd_bench,
             "lowerbound": _cmd_lowerbound}


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:        # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _COMMANDS[args.verb](args)
    except (DomainError, ValueError) as exc:
        print(f"edgeest: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EdgeEstError, OSError) as exc:
        print(f"edgeest: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
