#!/usr/bin/env python3
"""Semilog plot of a sweep CSV from `aqftshor sweep`, with fit lines when a
fit JSON from `aqftshor fit` is supplied.

Usage: python docs/plot_scaling.py sweep.csv [--fits fits.json] [-o out.png]
"""

import argparse
import json
from collections import defaultdict

import matplotlib.pyplot as plt
import numpy as np


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("sweep_csv")
    ap.add_argument("--fits", default=None)
    ap.add_argument("-o", "--out", default=None)
    args = ap.parse_args()

    series = defaultdict(list)
    with open(args.sweep_csv) as fh:
        next(fh)
        for line in fh:
            L, d_max, r, s, seconds = line.split(",")
            series[int(d_max)].append((int(L), float(s)))

    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for d_max in sorted(series):
        pts = sorted(series[d_max])
        ax.semilogy([L for L, _ in pts], [s for _, s in pts], "o-", ms=4,
                    label=f"d_max = {d_max}", base=2)

    if args.fits:
        with open(args.fits) as fh:
            for fit in json.load(fh):
                pts = sorted(series.get(fit["d_max"], []))
                if not pts:
                    continue
                Ls = np.linspace(pts[0][0], pts[-1][0], 50)
                ax.semilogy(Ls, fit["c"] * 2.0 ** (-Ls / fit["t"]), "--", lw=1,
                            base=2, color="gray")

    ax.set_xlabel("integer length L")
    ax.set_ylabel("useful-output probability s at r = 2^(L-1) + 2")
    ax.legend()
    fig.tight_layout()
    if args.out:
        fig.savefig(args.out, dpi=150)
        print(f"wrote {args.out}")
    else:
        plt.show()


if __name__ == "__main__":
    main()
