#!/usr/bin/env python3
"""Plot the CSV files written by `edcal report`.

Usage: plot_report.py REPORT_DIR [-o OUT_DIR]

Writes one PNG per ECDF overlay and per census profile, plus a
real-vs-simulated mean scatter, into OUT_DIR (default: REPORT_DIR).
"""
import argparse
import csv
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def plot_ecdf(path, out_dir):
    rows = read_csv(path)
    t = [float(r["t"]) for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.step(t, [float(r["real"]) for r in rows], where="post", label="data")
    ax.step(t, [float(r["sim"]) for r in rows], where="post", label="simulation")
    cell = path.stem.replace("ecdf_", "").replace("_", " ")
    ax.set_title(cell)
    ax.set_xlabel("hours")
    ax.set_ylabel("ECDF")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / (path.stem + ".png"), dpi=150)
    plt.close(fig)


def plot_census(path, out_dir):
    rows = read_csv(path)
    hours = [int(r["hour"]) for r in rows]
    sim = [float(r["sim_mean"]) for r in rows]
    half = [float(r["sim_ci95_halfwidth"]) if r["sim_ci95_halfwidth"] else 0.0 for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(hours, [float(r["real"]) for r in rows], marker="o", label="data")
    ax.errorbar(hours, sim, yerr=half, marker="s", capsize=3, label="simulation")
    ax.set_title(path.stem.replace("census_", "").replace("_", "/") + " hourly census")
    ax.set_xlabel("hour of day")
    ax.set_ylabel("patients present")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / (path.stem + ".png"), dpi=150)
    plt.close(fig)


def plot_means(path, out_dir):
    rows = [r for r in read_csv(path) if r["real_mean"] and r["sim_mean"]]
    real = [float(r["real_mean"]) for r in rows]
    sim = [float(r["sim_mean"]) for r in rows]
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    lim = max(real + sim) * 1.05
    ax.plot([0, lim], [0, lim], lw=0.8, color="grey")
    ax.scatter(real, sim, s=18)
    for r, x, y in zip(rows, real, sim):
        ax.annotate(f'{r["tag"]}/{r["unit"]} {r["metric"]}', (x, y), fontsize=6)
    ax.set_xlabel("data mean (h)")
    ax.set_ylabel("simulated mean (h)")
    fig.tight_layout()
    fig.savefig(out_dir / "means.png", dpi=150)
    plt.close(fig)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("report_dir", type=pathlib.Path)
    ap.add_argument("-o", "--out", type=pathlib.Path, default=None)
    args = ap.parse_args()
    out_dir = args.out or args.report_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    for path in sorted(args.report_dir.glob("ecdf_*.csv")):
        plot_ecdf(path, out_dir)
    for path in sorted(args.report_dir.glob("census_*.csv")):
        plot_census(path, out_dir)
    means = args.report_dir / "means.csv"
    if means.exists():
        plot_means(means, out_dir)
    print(f"figures written to {out_dir}")


if __name__ == "__main__":
    main()
