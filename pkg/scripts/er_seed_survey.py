"""How often the scan-statistic trend checks hold across seeds (Bernoulli(1/2), alpha = 0.75)."""

import argparse

import numpy as np

from itersig.ergodic_lab import er_scan
from itersig.processes import IIDModel


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=200)
    ap.add_argument("--alpha", type=float, default=0.75)
    args = ap.parse_args()
    model = IIDModel([[0.0], [1.0]], [0.5, 0.5])
    cps = [10**4, 10**5, 10**6]
    hits1 = hits2 = both = 0
    gaps1, gaps2 = [], []
    for s in range(args.seeds):
        r1 = er_scan(model, [1], args.alpha, cps, s)
        r2 = er_scan(model, [1, 1], args.alpha, cps, s)
        g1 = np.abs(r1.statistic - args.alpha)
        g2 = np.abs(r2.statistic - r2.predicted_limit)
        ok1 = 0.6 <= r1.statistic[-1] <= 0.9 and bool(np.all(np.diff(g1) <= 0))
        ok2 = bool(g2[-1] < g2[0])
        hits1 += ok1
        hits2 += ok2
        both += ok1 and ok2
        gaps1.append(g1)
        gaps2.append(g2)
    print(f"seeds: {args.seeds}")
    print(f"degree 1 band and monotone gap: {hits1}")
    print(f"degree 2 gap shrinks: {hits2}")
    print(f"both: {both}")
    print("mean gap degree 1:", np.round(np.mean(gaps1, axis=0), 4).tolist())
    print("mean gap degree 2:", np.round(np.mean(gaps2, axis=0), 4).tolist())


if __name__ == "__main__":
    main()
