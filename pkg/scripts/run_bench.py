"""Seeded accuracy benchmark over the four standard families; one CSV per family."""
import argparse
import json
from pathlib import Path

from edgeest.bench import ExperimentConfig, run_experiment, write_csv

FAMILIES = {
    "clique": dict(family="clique", n=4096, t=32),
    "gnm": dict(family="gnm", n=2048, m=8192),
    "star_forest": dict(family="star_forest", n=4096, degrees=(63,) * 32),
    "clique_biclique": dict(family="clique_biclique", n=2048, n_k=45, n_l=64, n_h=8),
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--families", nargs="+", choices=sorted(FAMILIES), default=sorted(FAMILIES))
    p.add_argument("--trials", type=int, default=300)
    p.add_argument("--eps", type=float, default=1 / 15)
    p.add_argument("--profile", choices=("paper", "desk"), default="desk")
    p.add_argument("--mbar-star", type=float, default=64.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--outdir", default="results/bench")
    args = p.parse_args()
    for name in args.families:
        cfg = ExperimentConfig(epsilon=args.eps, trials=args.trials, profile=args.profile,
                               m_bar_star=args.mbar_star, master_seed=args.seed,
                               workers=args.workers, timing=True, **FAMILIES[name])
        res = run_experiment(cfg)
        write_csv(res, Path(args.outdir) / f"{name}.csv")
        print(json.dumps({"family": name, **res.summary}, sort_keys=True), flush=True)


if __name__ == "__main__":
    main()
