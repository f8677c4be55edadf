"""Mean-TI and IQR heatmaps over the (c, u) grid.

Cells are annotated with their values to 3 decimals; darker blue means
lower TI (stronger hierarchical order).
"""

from __future__ import annotations

import argparse
import sys

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .io import FigureInputError, load_summary

FIGSIZE = (6.0, 5.0)
CMAP_MEAN = "Blues_r"   # low TI -> dark
CMAP_IQR = "Purples_r"
ANNOT_FMT = "{:.3f}"


def _grid(df: pd.DataFrame, column: str) -> tuple[np.ndarray, list[float], list[float]]:
    c_values = sorted(df["c"].unique())
    u_values = sorted(df["u"].unique())
    grid = np.full((len(u_values), len(c_values)), np.nan)
    for row in df.itertuples():
        grid[u_values.index(row.u), c_values.index(row.c)] = getattr(row, column)
    return grid, c_values, u_values


def build_heatmap(df: pd.DataFrame, column: str, title: str, cmap: str):
    grid, c_values, u_values = _grid(df, column)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    image = ax.imshow(grid, cmap=cmap, origin="lower", aspect="auto")
    ax.set_xticks(range(len(c_values)), [format(c, "g") for c in c_values])
    ax.set_yticks(range(len(u_values)), [format(u, "g") for u in u_values])
    ax.set_xlabel("initial heterogeneity c")
    ax.set_ylabel("mutation amplitude u")
    ax.set_title(title)
    span = np.nanmax(grid) - np.nanmin(grid)
    threshold = np.nanmin(grid) + 0.5 * span if span > 0 else np.nanmin(grid) - 1
    for i in range(len(u_values)):
        for j in range(len(c_values)):
            if np.isnan(grid[i, j]):
                continue
            color = "white" if grid[i, j] <= threshold else "black"
            ax.text(j, i, ANNOT_FMT.format(grid[i, j]), ha="center", va="center",
                    color=color, fontsize=10)
    fig.colorbar(image, ax=ax, shrink=0.85)
    fig.tight_layout()
    return fig


def build_figures(df: pd.DataFrame):
    mean_fig = build_heatmap(df, "mean_final_ti", "Mean final TI", CMAP_MEAN)
    iqr_fig = build_heatmap(df, "iqr_final_ti", "Final TI IQR across replicates", CMAP_IQR)
    return mean_fig, iqr_fig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="mean-TI and IQR heatmaps from summary.csv")
    parser.add_argument("run_dir")
    # outputs land in the working directory: run directories are read-only
    parser.add_argument("--out-mean", default="heatmap_mean.png")
    parser.add_argument("--out-iqr", default="heatmap_iqr.png")
    args = parser.parse_args(argv)
    try:
        df = load_summary(args.run_dir)
    except FigureInputError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    mean_fig, iqr_fig = build_figures(df)
    out_mean = args.out_mean
    out_iqr = args.out_iqr
    mean_fig.savefig(out_mean, dpi=150)
    iqr_fig.savefig(out_iqr, dpi=150)
    print(out_mean)
    print(out_iqr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
