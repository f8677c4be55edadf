"""Replicate runner, parameter sweeps, and regime classification.

A sweep executes |c| x |u| x replicates independent simulations, each
seeded by a stable mix of (base_seed, c, u, replicate) so grids can be
extended without disturbing existing cells, and any execution order
(including a process pool) yields byte-identical output files. The
trophic-incoherence trajectory of each replicate is sampled on the
survivor-restricted cumulative endorsement ledger.
"""

from __future__ import annotations

import csv
import datetime
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import __version__
from .config import ModelParams, RunConfig, SweepSpec, config_as_dict, with_cell
from .rng import float_key, mix64
from .simulation import World, step
from .trophic import DirectedGraph, NoEdgesError, analyze, layered_layout

# Stability band from the phase-map classification rule.
STABLE_MEDIAN = 0.45
STABLE_IQR = 0.05


class Regime(Enum):
    CONSISTENT_DECREASE = "ConsistentDecrease"
    REBOUND = "Rebound"
    NO_CHANGE = "NoChange"


@dataclass(frozen=True)
class Trajectory:
    times: tuple[int, ...]
    ti: tuple[float, ...]          # nan marks an undefined sample
    population: tuple[int, ...]

    def final_ti(self) -> float:
        for value in reversed(self.ti):
            if not math.isnan(value):
                return value
        return math.nan


@dataclass(frozen=True)
class ReplicateResult:
    c: float
    u: float
    replicate: int
    seed: int
    trajectory: Trajectory
    network: dict
    extinct: bool
    births: int
    deaths: int
    cooperation_events: int
    aborted_events: int
    degenerate_allocations: int


@dataclass(frozen=True)
class CellSummary:
    c: float
    u: float
    replicates: int
    final_tis: tuple[float, ...]
    mean_final_ti: float
    median_final_ti: float
    iqr_final_ti: float
    regime: Regime
    onset_step: int | None
    extinct_count: int


def replicate_seed(base_seed: int, c: float, u: float, replicate: int) -> int:
    """Stable 64-bit seed for one replicate of one sweep cell."""
    return mix64(base_seed, float_key(c), float_key(u), replicate)


def sample_ti(world: World, survivors_only: bool = True) -> float:
    """Incoherence of the (optionally survivor-restricted) ledger, or nan
    when the restricted ledger has no edges."""
    restrict = world.alive_ids() if survivors_only else None
    edges = world.ledger.edges(restrict_to=restrict)
    if not edges:
        return math.nan
    try:
        return analyze(DirectedGraph.from_edges(edges)).incoherence
    except NoEdgesError:
        return math.nan


def network_payload(world: World, survivors_only: bool = True) -> dict:
    """JSON-ready snapshot of the final endorsement network: edge list,
    per-node levels and layout x, speaking frequency, omitted nodes."""
    restrict = world.alive_ids() if survivors_only else None
    edges = world.ledger.edges(restrict_to=restrict)
    payload: dict = {
        "step": world.t,
        "population": world.population(),
        "incoherence": None,
        "nodes": [],
        "omitted": [],
        "edges": [[l, s, w] for l, s, w in edges],
    }
    if not edges:
        return payload
    graph = DirectedGraph.from_edges(edges)
    result = analyze(graph)
    layout = layered_layout(graph, result.levels)
    payload["incoherence"] = result.incoherence
    payload["nodes"] = [
        {
            "id": int(lab),
            "level": result.levels[lab],
            "x": layout.positions[lab][0],
            "speaking_frequency": layout.speaking_frequency[lab],
        }
        for lab in result.component
    ]
    payload["omitted"] = [int(lab) for lab in result.omitted]
    return payload


def run_replicate(params: ModelParams, seed: int, steps: int, sample_every: int = 100,
                  survivors_only: bool = True) -> tuple[Trajectory, World]:
    """Simulate one replicate, sampling TI every sample_every steps."""
    world = World.create(params, seed)
    times: list[int] = []
    tis: list[float] = []
    pops: list[int] = []
    for s in range(1, steps + 1):
        step(world)
        if s % sample_every == 0:
            times.append(s)
            tis.append(sample_ti(world, survivors_only))
            pops.append(world.population())
    return Trajectory(tuple(times), tuple(tis), tuple(pops)), world


def _replicate_task(args: tuple) -> ReplicateResult:
    params, spec, c, u, replicate = args
    seed = replicate_seed(spec.base_seed, c, u, replicate)
    cell_params = with_cell(params, c, u)
    trajectory, world = run_replicate(
        cell_params, seed, spec.steps, spec.sample_every, spec.survivors_only,
    )
    return ReplicateResult(
        c=c, u=u, replicate=replicate, seed=seed,
        trajectory=trajectory,
        network=network_payload(world, spec.survivors_only),
        extinct=world.population() == 0,
        births=world.births,
        deaths=world.deaths,
        cooperation_events=world.ledger.events,
        aborted_events=world.aborted_events,
        degenerate_allocations=world.degenerate_allocations,
    )


def summarize_cell(values) -> tuple[float, float, float]:
    """(mean, median, Q75 - Q25) with linear-interpolation quantiles."""
    v = np.asarray(list(values), dtype=np.float64)
    if v.size == 0:
        raise ValueError("need at least one value")
    q25, q75 = np.percentile(v, [25.0, 75.0])
    return float(v.mean()), float(np.median(v)), float(q75 - q25)


def _ensemble_stats(trajectories: list[Trajectory]) -> tuple[list[int], list[float], list[float]]:
    """Per-sample cross-replicate median and IQR over defined values."""
    if not trajectories:
        return [], [], []
    times = list(trajectories[0].times)
    medians: list[float] = []
    iqrs: list[float] = []
    for j in range(len(times)):
        vals = [tr.ti[j] for tr in trajectories if j < len(tr.ti) and not math.isnan(tr.ti[j])]
        if vals:
            _, med, iqr = summarize_cell(vals)
            medians.append(med)
            iqrs.append(iqr)
        else:
            medians.append(math.nan)
            iqrs.append(math.nan)
    return times, medians, iqrs


def stability_onset(trajectories: list[Trajectory], window: int = 5) -> int | None:
    """First sample time from which median < 0.45 and IQR < 0.05 hold for
    at least `window` consecutive samples; None if never."""
    times, medians, iqrs = _ensemble_stats(trajectories)
    ok = [
        (not math.isnan(m)) and m < STABLE_MEDIAN and q < STABLE_IQR
        for m, q in zip(medians, iqrs)
    ]
    run_length = 0
    for j, good in enumerate(ok):
        run_length = run_length + 1 if good else 0
        if run_length >= window:
            return times[j - window + 1]
    return None


def classify_regime(trajectories: list[Trajectory], rebound_delta: float = 0.05,
                    window: int = 5) -> Regime:
    """Phase label for one cell's replicate ensemble.

    ConsistentDecrease: median(final TI) < 0.45 and IQR < 0.05.
    Rebound: the ensemble median trajectory stayed in the ordered band
    (median < 0.45) for at least `window` consecutive samples but
    finished above 0.45 + rebound_delta. The sustained-entry requirement
    keeps the near-empty early ledger (whose few edges are trivially
    tree-like) from counting as an ordered phase.
    NoChange: everything else, including fully extinct ensembles.
    """
    finals = [tr.final_ti() for tr in trajectories]
    defined = [v for v in finals if not math.isnan(v)]
    if not defined:
        return Regime.NO_CHANGE
    _, median, iqr = summarize_cell(defined)
    if median < STABLE_MEDIAN and iqr < STABLE_IQR:
        return Regime.CONSISTENT_DECREASE
    _, medians, _ = _ensemble_stats(trajectories)
    track = [m for m in medians if not math.isnan(m)]
    run_length = 0
    entered = False
    for value in track:
        run_length = run_length + 1 if value < STABLE_MEDIAN else 0
        if run_length >= window:
            entered = True
            break
    if entered and track and track[-1] > STABLE_MEDIAN + rebound_delta:
        return Regime.REBOUND
    return Regime.NO_CHANGE


def summarize_results(results: list[ReplicateResult], spec: SweepSpec) -> CellSummary:
    """Cell summary over one (c, u) ensemble; statistics use only
    replicates with a defined final TI."""
    c, u = results[0].c, results[0].u
    trajectories = [r.trajectory for r in results]
    finals = tuple(tr.final_ti() for tr in trajectories)
    defined = [v for v in finals if not math.isnan(v)]
    if defined:
        mean, median, iqr = summarize_cell(defined)
    else:
        mean = median = iqr = math.nan
    return CellSummary(
        c=c, u=u, replicates=len(results), final_tis=finals,
        mean_final_ti=mean, median_final_ti=median, iqr_final_ti=iqr,
        regime=classify_regime(trajectories, spec.rebound_delta, spec.stability_window),
        onset_step=stability_onset(trajectories, spec.stability_window),
        extinct_count=sum(1 for r in results if r.extinct),
    )


# --- output files -----------------------------------------------------------

SUMMARY_COLUMNS = [
    "c", "u", "replicates", "mean_final_ti", "median_final_ti",
    "iqr_final_ti", "regime", "onset_step", "extinct_count",
]
TRAJECTORY_COLUMNS = ["c", "u", "replicate", "step", "ti", "population"]


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cell_tag(c: float, u: float, replicate: int) -> str:
    return f"{format(c, 'g')}_{format(u, 'g')}_{replicate}"


def write_trajectories_csv(path: str, results: list[ReplicateResult]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAJECTORY_COLUMNS)
        for r in sorted(results, key=lambda r: (r.c, r.u, r.replicate)):
            for t, ti, pop in zip(r.trajectory.times, r.trajectory.ti, r.trajectory.population):
                writer.writerow([_fmt(r.c), _fmt(r.u), r.replicate, t, _fmt(ti), pop])


def write_summary_csv(path: str, summaries: list[CellSummary]) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for s in sorted(summaries, key=lambda s: (s.c, s.u)):
            writer.writerow([
                _fmt(s.c), _fmt(s.u), s.replicates, _fmt(s.mean_final_ti),
                _fmt(s.median_final_ti), _fmt(s.iqr_final_ti), s.regime.value,
                "" if s.onset_step is None else s.onset_step, s.extinct_count,
            ])
    os.replace(tmp, path)


def write_network_json(out_dir: str, result: ReplicateResult) -> str:
    payload = dict(result.network)
    payload.update({"c": result.c, "u": result.u, "replicate": result.replicate})
    name = f"network_{cell_tag(result.c, result.u, result.replicate)}.json"
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return path


def write_meta(out_dir: str, config: RunConfig, results: list[ReplicateResult]) -> None:
    meta = {
        "version": __version__,
        # excluded from determinism comparisons
        "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config": config_as_dict(config),
        "replicates": [
            {
                "c": r.c, "u": r.u, "replicate": r.replicate, "seed": r.seed,
                "extinct": r.extinct, "births": r.births, "deaths": r.deaths,
                "cooperation_events": r.cooperation_events,
                "aborted_events": r.aborted_events,
                "degenerate_allocations": r.degenerate_allocations,
                "final_population": r.trajectory.population[-1] if r.trajectory.population else None,
            }
            for r in sorted(results, key=lambda r: (r.c, r.u, r.replicate))
        ],
    }
    with open(os.path.join(out_dir, "meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True, indent=1)
        fh.write("\n")


def run_sweep(config: RunConfig, out_dir: str, workers: int | None = None) -> list[CellSummary]:
    """Execute the full sweep and write all output files.

    summary.csv is written last (atomically), so its presence marks a
    completed run.
    """
    spec = config.sweep
    os.makedirs(out_dir, exist_ok=True)
    tasks = [
        (config.params, spec, c, u, r)
        for c in spec.c_values for u in spec.u_values for r in range(spec.replicates)
    ]
    n_workers = spec.workers if workers is None else workers
    if n_workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_replicate_task, tasks))
    else:
        results = [_replicate_task(t) for t in tasks]
    results.sort(key=lambda r: (r.c, r.u, r.replicate))

    by_cell: dict[tuple[float, float], list[ReplicateResult]] = {}
    for r in results:
        by_cell.setdefault((r.c, r.u), []).append(r)
    summaries = [summarize_results(cell, spec) for cell in by_cell.values()]

    write_trajectories_csv(os.path.join(out_dir, "trajectories.csv"), results)
    for r in results:
        write_network_json(out_dir, r)
    write_meta(out_dir, config, results)
    write_summary_csv(os.path.join(out_dir, "summary.csv"), summaries)
    return summaries


# --- offline re-classification ---------------------------------------------

def read_trajectories_csv(path: str) -> dict[tuple[float, float], dict[int, Trajectory]]:
    """Stored trajectories grouped by cell, keyed by replicate index."""
    cells: dict[tuple[float, float], dict[int, list[tuple[int, float, int]]]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in TRAJECTORY_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"trajectories file missing columns: {', '.join(missing)}")
        for row in reader:
            key = (float(row["c"]), float(row["u"]))
            rep = int(row["replicate"])
            cells.setdefault(key, {}).setdefault(rep, []).append(
                (int(row["step"]), float(row["ti"]), int(row["population"]))
            )
    out: dict[tuple[float, float], dict[int, Trajectory]] = {}
    for key, reps in cells.items():
        out[key] = {}
        for rep, rows in reps.items():
            rows.sort()
            out[key][rep] = Trajectory(
                tuple(r[0] for r in rows),
                tuple(r[1] for r in rows),
                tuple(r[2] for r in rows),
            )
    return out


def reclassify(run_dir: str, spec: SweepSpec) -> list[CellSummary]:
    """Recompute summary.csv purely from stored trajectories."""
    cells = read_trajectories_csv(os.path.join(run_dir, "trajectories.csv"))
    summaries = []
    for (c, u), reps in sorted(cells.items()):
        trajectories = [reps[k] for k in sorted(reps)]
        finals = tuple(tr.final_ti() for tr in trajectories)
        defined = [v for v in finals if not math.isnan(v)]
        if defined:
            mean, median, iqr = summarize_cell(defined)
        else:
            mean = median = iqr = math.nan
        summaries.append(CellSummary(
            c=c, u=u, replicates=len(trajectories), final_tis=finals,
            mean_final_ti=mean, median_final_ti=median, iqr_final_ti=iqr,
            regime=classify_regime(trajectories, spec.rebound_delta, spec.stability_window),
            onset_step=stability_onset(trajectories, spec.stability_window),
            extinct_count=sum(1 for tr in trajectories if tr.population and tr.population[-1] == 0),
        ))
    write_summary_csv(os.path.join(run_dir, "summary.csv"), summaries)
    return summaries
