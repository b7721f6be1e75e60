"""Plot mean coverage per degree (and pattern) from an experiment CSV.

    python python/plot_coverage.py rows.csv coverage.png
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    if len(sys.argv) != 3:
        sys.exit("usage: plot_coverage.py ROWS.csv OUT.png")
    rows = pd.read_csv(sys.argv[1])
    rows = rows[rows["error"].isna() | (rows["error"] == "")]
    fig, ax = plt.subplots(figsize=(6, 4))
    for pattern, group in rows.groupby("pattern"):
        stats = group.groupby("d")["coverage"].agg(["mean", "std"]).reset_index()
        ax.errorbar(stats["d"], stats["mean"], yerr=stats["std"].fillna(0), marker="o", capsize=3, label=pattern)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("average degree d")
    ax.set_ylabel("covered fraction")
    ax.set_ylim(0, 1)
    ax.legend()
    fig.tight_layout()
    fig.savefig(sys.argv[2], dpi=120)


if __name__ == "__main__":
    main()
