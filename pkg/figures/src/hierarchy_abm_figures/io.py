"""Readers and validation for run-directory files."""

from __future__ import annotations

import json
import os

import pandas as pd

SUMMARY_COLUMNS = [
    "c", "u", "replicates", "mean_final_ti", "median_final_ti",
    "iqr_final_ti", "regime", "onset_step", "extinct_count",
]
TRAJECTORY_COLUMNS = ["c", "u", "replicate", "step", "ti", "population"]


class FigureInputError(ValueError):
    pass


def _read_csv(path: str, required: list[str]) -> pd.DataFrame:
    if not os.path.exists(path):
        raise FigureInputError(f"missing input file: {path}")
    df = pd.read_csv(path)
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise FigureInputError(f"{os.path.basename(path)} is missing column(s): {', '.join(missing)}")
    if df.empty:
        raise FigureInputError(f"{os.path.basename(path)} has no data rows")
    return df


def load_summary(run_dir: str) -> pd.DataFrame:
    return _read_csv(os.path.join(run_dir, "summary.csv"), SUMMARY_COLUMNS)


def load_trajectories(run_dir: str) -> pd.DataFrame:
    return _read_csv(os.path.join(run_dir, "trajectories.csv"), TRAJECTORY_COLUMNS)


def load_meta(run_dir: str) -> dict:
    path = os.path.join(run_dir, "meta.json")
    if not os.path.exists(path):
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def network_path(run_dir: str, c: float, u: float, replicate: int) -> str:
    name = f"network_{format(c, 'g')}_{format(u, 'g')}_{replicate}.json"
    return os.path.join(run_dir, name)


def load_network(run_dir: str, c: float, u: float, replicate: int) -> dict:
    path = network_path(run_dir, c, u, replicate)
    if not os.path.exists(path):
        raise FigureInputError(f"missing network file: {path}")
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    for key in ("nodes", "edges"):
        if key not in payload:
            raise FigureInputError(f"{os.path.basename(path)} is missing key: {key}")
    return payload


def select_cell(df: pd.DataFrame, c: float, u: float) -> pd.DataFrame:
    cell = df[(df["c"] == c) & (df["u"] == u)]
    if cell.empty:
        cells = sorted({(row.c, row.u) for row in df.itertuples()})
        raise FigureInputError(f"no data for cell (c={c}, u={u}); available cells: {cells}")
    return cell
