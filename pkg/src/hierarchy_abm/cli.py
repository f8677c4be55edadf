"""Command-line front-end: simulate | sweep | ti | classify.

Configuration resolves as flags > HIERARCHY_ABM_SEED (base_seed only) >
config file > defaults. Exit code 0 means every requested output was
written; configuration problems (missing file, unknown or invalid keys)
exit with 2 and a message naming the offender.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import ConfigError, RunConfig, load_config_file, resolve_config
from .harness import (
    ReplicateResult,
    network_payload,
    reclassify,
    run_replicate,
    run_sweep,
    write_meta,
    write_network_json,
    write_trajectories_csv,
)
from .trophic import DirectedGraph, analyze, read_edge_list


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from err


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hierarchy-abm",
        description="Hierarchy-emergence simulator and trophic-incoherence tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one replicate")
    sim.add_argument("--config", help="YAML config file")
    sim.add_argument("--c", type=float, help="initial ability spread")
    sim.add_argument("--u", type=float, help="mutation amplitude")
    sim.add_argument("--seed", type=int, help="world seed")
    sim.add_argument("--steps", type=int, help="simulation steps")
    sim.add_argument("--sample-every", type=int, dest="sample_every")
    sim.add_argument("--out", required=True, help="output directory")
    sim.set_defaults(func=_cmd_simulate)

    swp = sub.add_parser("sweep", help="run a (c, u) parameter sweep")
    swp.add_argument("--config", help="YAML config file")
    swp.add_argument("--grid-c", type=_float_list, dest="grid_c", help="comma-separated c values")
    swp.add_argument("--grid-u", type=_float_list, dest="grid_u", help="comma-separated u values")
    swp.add_argument("--reps", type=int, help="replicates per cell")
    swp.add_argument("--steps", type=int, help="simulation steps")
    swp.add_argument("--sample-every", type=int, dest="sample_every")
    swp.add_argument("--seed", type=int, help="base seed")
    swp.add_argument("--workers", type=int, help="parallel worker processes")
    swp.add_argument("--out", required=True, help="output directory")
    swp.set_defaults(func=_cmd_sweep)

    ti = sub.add_parser("ti", help="trophic incoherence of an edge-list file")
    ti.add_argument("edge_list", help="edge list: one 'source target weight' per line")
    ti.add_argument("--levels-out", dest="levels_out", help="per-node levels CSV path")
    ti.set_defaults(func=_cmd_ti)

    cls = sub.add_parser("classify", help="re-label stored trajectories in a run directory")
    cls.add_argument("run_dir", help="directory containing trajectories.csv")
    cls.add_argument("--config", help="YAML config file")
    cls.set_defaults(func=_cmd_classify)
    return parser


def _resolve(args: argparse.Namespace, overrides: dict) -> RunConfig:
    file_values = load_config_file(args.config) if getattr(args, "config", None) else {}
    return resolve_config(file_values, overrides)


def _cmd_simulate(args: argparse.Namespace) -> int:
    overrides = {
        "initial_spread": args.c,
        "mutation_scale": args.u,
        "base_seed": args.seed,
        "steps": args.steps,
        "sample_every": args.sample_every,
    }
    config = _resolve(args, overrides)
    params, spec = config.params, config.sweep
    os.makedirs(args.out, exist_ok=True)
    trajectory, world = run_replicate(
        params, spec.base_seed, spec.steps, spec.sample_every, spec.survivors_only,
    )
    result = ReplicateResult(
        c=params.initial_spread, u=params.mutation_scale, replicate=0,
        seed=spec.base_seed, trajectory=trajectory,
        network=network_payload(world, spec.survivors_only),
        extinct=world.population() == 0,
        births=world.births, deaths=world.deaths,
        cooperation_events=world.ledger.events,
        aborted_events=world.aborted_events,
        degenerate_allocations=world.degenerate_allocations,
    )
    write_trajectories_csv(os.path.join(args.out, "trajectories.csv"), [result])
    write_network_json(args.out, result)
    write_meta(args.out, config, [result])
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    overrides = {
        "c_values": args.grid_c,
        "u_values": args.grid_u,
        "replicates": args.reps,
        "steps": args.steps,
        "sample_every": args.sample_every,
        "base_seed": args.seed,
        "workers": args.workers,
    }
    config = _resolve(args, overrides)
    run_sweep(config, args.out)
    return 0


def _cmd_ti(args: argparse.Namespace) -> int:
    edges = read_edge_list(args.edge_list)
    if not edges:
        print("error: edge list is empty", file=sys.stderr)
        return 1
    self_loops = sum(1 for s, t, _ in edges if s == t)
    if self_loops:
        print(f"warning: stripped {self_loops} self-loop(s)", file=sys.stderr)
    result = analyze(DirectedGraph.from_edges(edges))
    print(f"{result.incoherence:.6f}")
    levels_path = args.levels_out or args.edge_list + ".levels.csv"
    with open(levels_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("node,level,in_component\n")
        for label in sorted(result.levels):
            fh.write(f"{label},{result.levels[label]!r},1\n")
        for label in sorted(result.omitted):
            fh.write(f"{label},,0\n")
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    meta_path = os.path.join(args.run_dir, "meta.json")
    file_values: dict = {}
    if os.path.exists(meta_path):
        with open(meta_path, encoding="utf-8") as fh:
            stored = json.load(fh).get("config", {})
        file_values = {
            k: stored[k]
            for k in ("stability_window", "rebound_delta", "sample_every")
            if k in stored
        }
    if getattr(args, "config", None):
        file_values.update(load_config_file(args.config))
    config = resolve_config(file_values, {})
    reclassify(args.run_dir, config.sweep)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
