"""Plot a series CSV: prices, call value vs hedge value, holdings, noise and jump count.

    python scripts/plot_series.py results/series_pos.csv -o series_pos.png
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from jdhedge.series import read_series_csv


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("-o", "--output", default="series.png")
    args = ap.parse_args()
    with open(args.csv) as fh:
        d = read_series_csv(fh.read())
    t = d["t"]
    fig, axes = plt.subplots(4, 1, figsize=(8, 10), sharex=True)
    axes[0].plot(t, d["s"], label="S (jump-diffusion)")
    axes[0].plot(t, d["s_bs"], "--", label="S^BS (shadow gBm)")
    axes[1].plot(t, d["bs_price"], label="call value")
    axes[1].step(t, d["v_pi_n"], where="post", label="hedge portfolio")
    axes[2].plot(t, d["bs_delta"], label="BS delta")
    axes[2].step(t, d["pi_n"], where="post", label="discrete holding")
    axes[3].plot(t, d["w"], label="W")
    axes[3].step(t, d["n_jumps"], where="post", label="N")
    for ax in axes:
        ax.legend(loc="best", fontsize=8)
    axes[-1].set_xlabel("months")
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)


if __name__ == "__main__":
    main()
