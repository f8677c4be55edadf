"""Categorical phase map of hierarchical regimes over the (c, u) grid."""

from __future__ import annotations

import argparse
import sys

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
from matplotlib.colors import ListedColormap
from matplotlib.patches import Patch

from .io import FigureInputError, load_summary

FIGSIZE = (6.0, 5.0)
REGIME_COLORS = {
    "ConsistentDecrease": "#1f4e9c",
    "Rebound": "#f58220",
    "NoChange": "#9e9e9e",
}
REGIME_ORDER = list(REGIME_COLORS)


def build_figure(df: pd.DataFrame):
    unknown = set(df["regime"]) - set(REGIME_ORDER)
    if unknown:
        raise FigureInputError(f"unknown regime label(s): {sorted(unknown)}")
    c_values = sorted(df["c"].unique())
    u_values = sorted(df["u"].unique())
    grid = np.full((len(u_values), len(c_values)), np.nan)
    for row in df.itertuples():
        grid[u_values.index(row.u), c_values.index(row.c)] = REGIME_ORDER.index(row.regime)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    cmap = ListedColormap([REGIME_COLORS[r] for r in REGIME_ORDER])
    ax.imshow(grid, cmap=cmap, origin="lower", aspect="auto", vmin=-0.5,
              vmax=len(REGIME_ORDER) - 0.5)
    ax.set_xticks(range(len(c_values)), [format(c, "g") for c in c_values])
    ax.set_yticks(range(len(u_values)), [format(u, "g") for u in u_values])
    ax.set_xlabel("initial heterogeneity c")
    ax.set_ylabel("mutation amplitude u")
    ax.set_title("Hierarchical regimes")
    for row in df.itertuples():
        i = u_values.index(row.u)
        j = c_values.index(row.c)
        ax.text(j, i, row.regime, ha="center", va="center", color="white", fontsize=8)
    ax.legend(handles=[Patch(color=REGIME_COLORS[r], label=r) for r in REGIME_ORDER],
              loc="upper right", fontsize=8)
    fig.tight_layout()
    return fig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="phase map from summary.csv")
    parser.add_argument("run_dir")
    parser.add_argument("--out", default="phase_map.png")
    args = parser.parse_args(argv)
    try:
        fig = build_figure(load_summary(args.run_dir))
    except FigureInputError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    fig.savefig(args.out, dpi=150)
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
