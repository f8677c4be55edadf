"""TI trajectory plot for one (c, u) cell: per-replicate gray lines,
median curve, interquartile band, and the green stability region.

The stability region is recomputed from the plotted series with the
phase-map thresholds (median < 0.45, IQR < 0.05, held for the run's
stability window), so the shading always matches the curves shown.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .io import FigureInputError, load_meta, load_trajectories, select_cell

FIGSIZE = (7.0, 4.5)
STABLE_MEDIAN = 0.45
STABLE_IQR = 0.05
DEFAULT_WINDOW = 5


def cell_series(df: pd.DataFrame, c: float, u: float):
    """(steps, per-replicate TI matrix) for one cell, NaN-padded."""
    cell = select_cell(df, c, u)
    steps = np.array(sorted(cell["step"].unique()))
    replicates = sorted(cell["replicate"].unique())
    matrix = np.full((len(replicates), len(steps)), np.nan)
    index = {s: k for k, s in enumerate(steps)}
    for row in cell.itertuples():
        matrix[replicates.index(row.replicate), index[row.step]] = row.ti
    return steps, matrix


def stability_windows(steps: np.ndarray, matrix: np.ndarray, window: int):
    """Contiguous [start, end] step spans where the ensemble satisfies the
    stability criterion for at least `window` consecutive samples."""
    with np.errstate(all="ignore"):
        medians = np.nanmedian(matrix, axis=0)
        q25 = np.nanpercentile(matrix, 25.0, axis=0)
        q75 = np.nanpercentile(matrix, 75.0, axis=0)
    ok = (medians < STABLE_MEDIAN) & ((q75 - q25) < STABLE_IQR)
    ok &= ~np.isnan(medians)
    spans = []
    run_start = None
    for k, good in enumerate(ok):
        if good and run_start is None:
            run_start = k
        elif not good and run_start is not None:
            if k - run_start >= window:
                spans.append((steps[run_start], steps[k - 1]))
            run_start = None
    if run_start is not None and len(ok) - run_start >= window:
        spans.append((steps[run_start], steps[-1]))
    return spans, medians, q25, q75


def build_figure(df: pd.DataFrame, c: float, u: float, window: int = DEFAULT_WINDOW):
    steps, matrix = cell_series(df, c, u)
    spans, medians, q25, q75 = stability_windows(steps, matrix, window)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for row in matrix:
        ax.plot(steps, row, color="0.75", linewidth=0.7, zorder=1)
    ax.fill_between(steps, q25, q75, color="#1f4e9c", alpha=0.25, zorder=2,
                    label="interquartile range")
    ax.plot(steps, medians, color="#1f4e9c", linewidth=1.8, zorder=3, label="median TI")
    for start, end in spans:
        ax.axvspan(start, end, color="#2ca02c", alpha=0.18, zorder=0)
    ax.axhline(STABLE_MEDIAN, color="0.4", linewidth=0.8, linestyle="--")
    ax.set_xlabel("step")
    ax.set_ylabel("trophic incoherence")
    ax.set_title(f"TI trajectories at c={format(c, 'g')}, u={format(u, 'g')}")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return fig, spans


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="TI trajectories for one sweep cell")
    parser.add_argument("run_dir")
    parser.add_argument("--c", type=float, required=True)
    parser.add_argument("--u", type=float, required=True)
    parser.add_argument("--out", default="trajectories.png")
    args = parser.parse_args(argv)
    try:
        df = load_trajectories(args.run_dir)
        window = int(load_meta(args.run_dir).get("config", {}).get(
            "stability_window", DEFAULT_WINDOW))
        fig, _ = build_figure(df, args.c, args.u, window)
    except FigureInputError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    fig.savefig(args.out, dpi=150)
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
