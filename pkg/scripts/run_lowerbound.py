"""Divergence rate of coupled runs on hard pairs, over a sweep of query budgets."""
import argparse
import json

from edgeest.bench import LowerBoundConfig, run_lowerbound


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=1 << 14)
    p.add_argument("--nk", type=int, default=1 << 7)
    p.add_argument("--eps", type=float, default=1 / 11)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--budgets", type=int, nargs="*", default=[],
                   help="query budgets; empty means the default floor(R/10) clamped to 1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="")
    args = p.parse_args()
    for b in args.budgets or [None]:
        cfg = LowerBoundConfig(n=args.n, n_k=args.nk, epsilon=args.eps, trials=args.trials,
                               master_seed=args.seed, budget=b,
                               out=f"{args.out}.{b}.csv" if args.out and b else args.out)
        _, summary = run_lowerbound(cfg)
        print(json.dumps(summary, sort_keys=True), flush=True)


if __name__ == "__main__":
    main()
