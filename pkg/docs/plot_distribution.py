#!/usr/bin/env python3
"""Plot one or more outcome-distribution CSVs written by `aqftshor dist`.

Usage: python docs/plot_distribution.py comb.csv [more.csv ...] [-o out.png]
"""

import argparse

import matplotlib.pyplot as plt


def load(path):
    meta, js, ps = {}, [], []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                meta = dict(kv.split("=", 1) for kv in line[1:].split())
            elif not line.startswith("j,"):
                j, p = line.split(",")
                js.append(int(j))
                ps.append(float(p))
    return meta, js, ps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", nargs="+")
    ap.add_argument("-o", "--out", default=None)
    args = ap.parse_args()

    fig, axes = plt.subplots(len(args.csv), 1, figsize=(7, 2.6 * len(args.csv)), squeeze=False)
    for ax, path in zip(axes[:, 0], args.csv):
        meta, js, ps = load(path)
        ax.vlines(js, 0, ps, lw=1)
        ax.set_xlabel("measured j")
        ax.set_ylabel("Pr(j)")
        ax.set_title(
            f"L={meta.get('L')} r={meta.get('r')} d_max={meta.get('d_max')} "
            f"({meta.get('variant')}, sigma={meta.get('sigma')})",
            fontsize=9,
        )
    fig.tight_layout()
    if args.out:
        fig.savefig(args.out, dpi=150)
        print(f"wrote {args.out}")
    else:
        plt.show()


if __name__ == "__main__":
    main()
