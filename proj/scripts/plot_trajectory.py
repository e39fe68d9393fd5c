#!/usr/bin/env python3
"""Plot one or more trajectory CSV files written by the ddstab CLI.

Usage: plot_trajectory.py TRAJECTORY.csv [MORE.csv ...]

Writes a PNG next to each input: path plot, x/y/theta vs t, v/omega vs t.
"""

import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path) as f:
        rows = list(csv.DictReader(f))
    if not rows:
        raise SystemExit(f"{path}: no data rows")
    cols = {k: [float(r[k]) for r in rows] for k in rows[0] if k != "regime"}
    cols["local"] = [r["regime"] == "LOCAL" for r in rows]
    return cols


def plot(path):
    cols = load(path)
    fig, axes = plt.subplots(1, 3, figsize=(15, 4.5))

    ax = axes[0]
    ax.plot(cols["x"], cols["y"], lw=1.2)
    ax.plot(cols["x"][0], cols["y"][0], "go", label="start")
    ax.plot(0, 0, "r*", ms=12, label="goal")
    if any(cols["local"]):
        i = cols["local"].index(True)
        ax.plot(cols["x"][i], cols["y"][i], "ks", ms=5, label="switch")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.axis("equal")
    ax.legend()
    ax.set_title("path")

    ax = axes[1]
    for key, label in (("x", "x [m]"), ("y", "y [m]"), ("theta", "theta [rad]")):
        ax.plot(cols["t"], cols[key], label=label)
    ax.set_xlabel("t [s]")
    ax.legend()
    ax.set_title("states")

    ax = axes[2]
    ax.plot(cols["t"], cols["v"], label="v [m/s]")
    ax.plot(cols["t"], cols["omega"], label="omega [rad/s]")
    ax.set_xlabel("t [s]")
    ax.legend()
    ax.set_title("commands")

    fig.tight_layout()
    out = os.path.splitext(path)[0] + ".png"
    fig.savefig(out, dpi=130)
    plt.close(fig)
    print(out)


def main():
    if len(sys.argv) < 2:
        raise SystemExit(__doc__.strip())
    for path in sys.argv[1:]:
        plot(path)


if __name__ == "__main__":
    main()
