"""Median query cost against m on planted cliques in a fixed vertex set."""
import argparse
import csv
import sys

import numpy as np

from edgeest.driver import estimate_edges
from edgeest.families import clique, clique_size_for
from edgeest.oracle import OracleSession
from edgeest.tuning import profile


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--log-n", type=int, default=16)
    p.add_argument("--log-m", type=int, nargs=2, default=(8, 18), metavar=("LO", "HI"))
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--eps", type=float, default=1 / 15)
    p.add_argument("--profile", choices=("paper", "desk"), default="desk")
    p.add_argument("--mbar-star", type=float, default=64.0)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    n = 1 << args.log_n
    tun = profile(args.profile).with_(m_bar_star=args.mbar_star)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "m", "median_queries", "median_estimate"])
    ms, meds = [], []
    for e in range(args.log_m[0], args.log_m[1] + 1):
        g = clique(clique_size_for(1 << e), n)
        totals, ests = [], []
        for s in range(args.trials):
            session = OracleSession(g, seed=args.seed + 1000 * e + s)
            ests.append(estimate_edges(session, args.eps, tuning=tun))
            totals.append(session.ledger.total)
        ms.append(g.m)
        meds.append(np.median(totals))
        w.writerow([n, g.m, meds[-1], np.median(ests)])
        sys.stdout.flush()
    ms, meds = np.log2(ms), np.log2(meds)
    split = 2 / 3 * args.log_n
    for name, sel in (("low", ms <= split), ("high", ms > split)):
        if sel.sum() >= 2:
            print(f"# slope {name}: {np.polyfit(ms[sel], meds[sel], 1)[0]:+.3f}", file=sys.stderr)


if __name__ == "__main__":
    main()
