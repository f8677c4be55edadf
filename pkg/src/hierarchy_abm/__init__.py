"""Hierarchy-emergence agent-based simulator and trophic network metrics."""

__version__ = "0.1.0"

from .actions import Action, Sex
from .agents import Agent, birth_rate, cooperation_predicate, reproduction_predicate, select_intent
from .config import ModelParams, RunConfig, SweepSpec, resolve_config
from .cooperation import (
    InteractionLedger,
    allocate_shares,
    consensus_coefficient,
    expected_dominance,
    percentile_ranks,
    select_speaker,
    speaker_probabilities,
)
from .genetics import inherit, initial_capability, mutate, offspring_ability
from .harness import (
    CellSummary,
    Regime,
    Trajectory,
    classify_regime,
    run_replicate,
    run_sweep,
    stability_onset,
    summarize_cell,
)
from .simulation import World, run, step
from .trophic import (
    DirectedGraph,
    NoEdgesError,
    TrophicResult,
    analyze,
    largest_weak_component,
    layered_layout,
    trophic_incoherence,
    trophic_levels,
)

__all__ = [
    "Action", "Agent", "CellSummary", "DirectedGraph", "InteractionLedger",
    "ModelParams", "NoEdgesError", "Regime", "RunConfig", "Sex", "SweepSpec",
    "Trajectory", "TrophicResult", "World", "allocate_shares", "analyze",
    "birth_rate", "classify_regime", "consensus_coefficient",
    "cooperation_predicate", "expected_dominance", "inherit",
    "initial_capability", "largest_weak_component", "layered_layout", "mutate",
    "offspring_ability", "percentile_ranks", "reproduction_predicate",
    "resolve_config", "run", "run_replicate", "run_sweep", "select_intent",
    "select_speaker", "speaker_probabilities", "stability_onset", "step",
    "summarize_cell", "trophic_incoherence", "trophic_levels",
]
