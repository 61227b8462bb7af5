"""Plot an `evtcr run` CSV: one line per (method, n_antennas).

usage: python docs/plot_sweep.py mean_vs_q.csv [out.png]
"""

import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt


def main(path, out=None):
    series = defaultdict(list)
    bands = defaultdict(list)
    sweep_var = None
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            if row["status"] != "ok":
                continue
            sweep_var = row["sweep_var"]
            x = float(row["sweep_value"])
            key = (row["method"], row["n_antennas"])
            series[key].append((x, float(row["value_nats"])))
            if row["ci_low"]:
                bands[key].append((x, float(row["ci_low"]), float(row["ci_high"])))

    fig, ax = plt.subplots()
    for (method, n), pts in sorted(series.items()):
        xs, ys = zip(*sorted(pts))
        label = method if sweep_var == "n" else f"{method}, N={n}"
        style = "o" if method == "mc" else "-"
        ax.plot(xs, ys, style, label=label, markersize=4)
        if bands[(method, n)]:
            bx, lo, hi = zip(*sorted(bands[(method, n)]))
            ax.fill_between(bx, lo, hi, alpha=0.2)
    if sweep_var == "n":
        ax.set_xscale("log")
    ax.set_xlabel(sweep_var)
    ax.set_ylabel("capacity (nats/s/Hz)")
    ax.legend(fontsize="small")
    ax.grid(True, alpha=0.3)
    if out:
        fig.savefig(out, dpi=150, bbox_inches="tight")
    else:
        plt.show()


if __name__ == "__main__":
    main(*sys.argv[1:3])
