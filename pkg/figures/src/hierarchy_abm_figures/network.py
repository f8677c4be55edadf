"""Layered drawing of a final endorsement network.

Nodes sit at their stored layout coordinates (y is the trophic level);
size and color encode speaking frequency; directed edges sweep from
listener to speaker.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import FancyArrowPatch

from .io import FigureInputError, load_network

FIGSIZE = (7.0, 6.0)
NODE_CMAP = "viridis"
NODE_SIZE_RANGE = (20.0, 420.0)
EDGE_ALPHA = 0.3


def build_figure(payload: dict):
    nodes = payload["nodes"]
    if not nodes:
        raise FigureInputError("network has no drawable nodes")
    xy = {n["id"]: (n["x"], n["level"]) for n in nodes}
    freq = np.array([n["speaking_frequency"] for n in nodes], dtype=float)
    top = freq.max() if freq.max() > 0 else 1.0
    sizes = NODE_SIZE_RANGE[0] + (NODE_SIZE_RANGE[1] - NODE_SIZE_RANGE[0]) * freq / top

    fig, ax = plt.subplots(figsize=FIGSIZE)
    drawable = set(xy)
    weights = [w for _, t, w in payload["edges"] if t in drawable]
    w_top = max(weights) if weights else 1.0
    for source, target, weight in payload["edges"]:
        if source not in drawable or target not in drawable:
            continue  # endpoints outside the solved component
        arrow = FancyArrowPatch(
            xy[source], xy[target], arrowstyle="-|>", mutation_scale=7,
            color="0.45", alpha=EDGE_ALPHA, linewidth=0.5 + 1.5 * weight / w_top,
            shrinkA=4, shrinkB=4, zorder=1,
        )
        ax.add_patch(arrow)
    scatter = ax.scatter(
        [xy[n["id"]][0] for n in nodes],
        [xy[n["id"]][1] for n in nodes],
        s=sizes, c=freq, cmap=NODE_CMAP, zorder=2, edgecolors="black", linewidths=0.4,
    )
    fig.colorbar(scatter, ax=ax, shrink=0.8, label="speaking frequency")
    incoherence = payload.get("incoherence")
    subtitle = f"TI = {incoherence:.3f}" if incoherence is not None else "TI undefined"
    ax.set_title(f"Endorsement network at step {payload.get('step', '?')} ({subtitle})")
    ax.set_xlabel("layer position")
    ax.set_ylabel("trophic level")
    fig.tight_layout()
    return fig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="layered network drawing for one replicate")
    parser.add_argument("run_dir")
    parser.add_argument("--c", type=float, required=True)
    parser.add_argument("--u", type=float, required=True)
    parser.add_argument("--rep", type=int, default=0)
    parser.add_argument("--out", default="network.png")
    args = parser.parse_args(argv)
    try:
        payload = load_network(args.run_dir, args.c, args.u, args.rep)
        fig = build_figure(payload)
    except FigureInputError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    fig.savefig(args.out, dpi=150)
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
