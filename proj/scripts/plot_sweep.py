#!/usr/bin/env python3
"""Plot one or more sweep CSVs written by `sqzbudget sweep-freq` / `sweep-pump`.

    sqzbudget sweep-freq --config configs/geo600_old_msr.cfg --output old.csv
    sqzbudget sweep-freq --config configs/geo600_new_msr.cfg --output new.csv
    python3 scripts/plot_sweep.py old.csv new.csv -o sweep.png
"""
import argparse
import csv

import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        cols = list(zip(*[[float(v) for v in row] for row in reader]))
    return header, cols


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", nargs="+")
    ap.add_argument("-o", "--output", default=None)
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4.5))
    xlabel = None
    for path in args.csv:
        header, (x, sqz, anti, _eff) = load(path)
        log_x = header[0] == "frequency_hz"
        xlabel = "frequency [Hz]" if log_x else "pump power [mW]"
        (line,) = ax.plot(x, sqz, label=f"{path} squeezing")
        ax.plot(x, anti, "--", color=line.get_color(), label=f"{path} anti-squeezing")
        if log_x:
            ax.set_xscale("log")
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("noise power relative to vacuum [dB]")
    ax.legend(fontsize="small")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    if args.output:
        fig.savefig(args.output, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
