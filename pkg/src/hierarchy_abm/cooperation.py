"""Cooperative foraging events: speaker selection, consensus, shares, ledger.

One event runs through a fixed pipeline: pick a speaker by
ability-weighted softmax, rank the team, derive speaker/listener
dominance from the ranks, combine those into a consensus coefficient,
and split the energy pool by consensus-weighted shares. Each listener
endorses the speaker once in the cumulative interaction ledger; the
ledger is the directed network the hierarchy metrics run on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


def speaker_probabilities(abilities: Sequence[float]) -> np.ndarray:
    """Softmax of abilities, computed shift-invariantly.

    The max is subtracted before exponentiation: abilities sit around 100
    and naive exp overflows double precision.
    """
    a = np.asarray(abilities, dtype=np.float64)
    if a.size == 0:
        raise ValueError("need at least one ability")
    z = np.exp(a - a.max())
    return z / z.sum()


def select_speaker(abilities: Sequence[float], rng) -> int:
    """Sample a speaker index via inverse CDF on one uniform draw."""
    p = speaker_probabilities(abilities)
    u = rng.random()
    idx = int(np.searchsorted(np.cumsum(p), u, side="right"))
    return min(idx, len(p) - 1)


def percentile_ranks(values: Sequence[float]) -> np.ndarray:
    """Normalized percentile ranks in (0, 1]; ties get averaged ranks."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("need at least one value")
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=np.float64)
    ranks[order] = np.arange(1, v.size + 1)
    _, inverse = np.unique(v, return_inverse=True)
    sums = np.bincount(inverse, weights=ranks)
    counts = np.bincount(inverse)
    return (sums / counts)[inverse] / v.size


def expected_dominance(rank: float, is_speaker: bool) -> float:
    """Speaker dominance in (0.5, 1], listener dominance in (0, 0.5]."""
    if not 0.0 < rank <= 1.0:
        raise ValueError("rank must lie in (0, 1]")
    return 0.5 + 0.5 * rank if is_speaker else 0.5 * rank


def consensus_coefficient(speaker_ability: float, speaker_dominance: float,
                          listeners: Sequence[tuple[float, float]]) -> float:
    """Mean ability-gap x dominance-gap interaction, offset by 1.

    Above 1 the group aligns with the speaker, below 1 it resists, and a
    team of equals lands exactly on 1. Not clamped: heterogeneous
    abilities can push it far from 1, which downstream share allocation
    must tolerate.
    """
    if not listeners:
        raise ValueError("need at least one listener")
    s = sum((speaker_ability - a_l) * (speaker_dominance - d_l) for a_l, d_l in listeners)
    return 1.0 + s / len(listeners)


def allocate_shares(abilities: Sequence[float], consensus: float) -> tuple[np.ndarray, bool]:
    """Consensus-weighted resource shares summing to 1.

    Share i is proportional to 1 + consensus * ability_i. If any such
    numerator is nonpositive (possible because consensus is unbounded),
    shares fall back to uniform and the degenerate flag is set so callers
    can count these events.
    """
    a = np.asarray(abilities, dtype=np.float64)
    if a.size == 0:
        raise ValueError("need at least one ability")
    numerators = 1.0 + consensus * a
    if numerators.min() <= 0.0:
        return np.full(a.size, 1.0 / a.size), True
    return numerators / numerators.sum(), False


@dataclass(frozen=True)
class CooperationEvent:
    step: int
    index_in_step: int
    team: tuple[int, ...]           # 3 agent ids, sorted
    speaker: int
    listeners: tuple[int, ...]
    consensus: float
    shares: dict[int, float]        # agent id -> fraction of the pool
    energy_pool: float
    food_id: int
    degenerate: bool


@dataclass
class InteractionLedger:
    """Cumulative listener-to-speaker endorsement counts.

    Entries only ever grow, the diagonal stays empty, and the total mass
    equals two endorsements per completed three-agent event.
    """

    counts: dict[tuple[int, int], int] = field(default_factory=dict)
    events: int = 0

    def record(self, listener: int, speaker: int) -> None:
        if listener == speaker:
            raise ValueError("self-endorsement is excluded")
        key = (listener, speaker)
        self.counts[key] = self.counts.get(key, 0) + 1

    def total_mass(self) -> int:
        return sum(self.counts.values())

    def edges(self, restrict_to: set[int] | None = None) -> list[tuple[int, int, int]]:
        """Sorted (listener, speaker, weight) triples, optionally only
        between agents in `restrict_to` (e.g. current survivors)."""
        if restrict_to is None:
            items = self.counts.items()
        else:
            items = (
                (pair, w) for pair, w in self.counts.items()
                if pair[0] in restrict_to and pair[1] in restrict_to
            )
        return sorted((l, s, w) for (l, s), w in items)


def execute_cooperation(world, initiator: int, team: Sequence[int], rng,
                        index_in_step: int) -> CooperationEvent | None:
    """Run one cooperative event, mutating agent energies, the food
    supply and the ledger.

    Consumes the available food item nearest to the initiator within the
    food radius (ties to the lower item id). If every such item was taken
    by an earlier event this step, the event aborts: no energy moves and
    nothing is recorded.
    """
    members = sorted(team)
    params = world.params
    init_pos = world.agents[initiator].pos

    available = [item for item in world.food if item.available]
    food = None
    if available:
        pos = np.array([item.pos for item in available])
        dist = np.hypot(pos[:, 0] - init_pos[0], pos[:, 1] - init_pos[1])
        k = int(dist.argmin())  # first minimum, i.e. lowest item id on ties
        if dist[k] <= params.food_radius:
            food = available[k]
    if food is None:
        world.aborted_events += 1
        return None
    food.available = False

    abilities = [world.agents[m].ability for m in members]
    speaker_idx = select_speaker(abilities, rng)
    speaker = members[speaker_idx]
    listeners = tuple(m for m in members if m != speaker)

    ranks = percentile_ranks(abilities)
    d_speaker = expected_dominance(ranks[speaker_idx], is_speaker=True)
    listener_pairs = [
        (abilities[k], expected_dominance(ranks[k], is_speaker=False))
        for k, m in enumerate(members) if m != speaker
    ]
    consensus = consensus_coefficient(abilities[speaker_idx], d_speaker, listener_pairs)
    shares, degenerate = allocate_shares(abilities, consensus)
    if degenerate:
        world.degenerate_allocations += 1

    pool = params.food_energy
    for k, m in enumerate(members):
        world.agents[m].energy += shares[k] * pool
    for listener in listeners:
        world.ledger.record(listener, speaker)
    world.ledger.events += 1

    return CooperationEvent(
        step=world.t,
        index_in_step=index_in_step,
        team=tuple(members),
        speaker=speaker,
        listeners=listeners,
        consensus=consensus,
        shares={m: float(shares[k]) for k, m in enumerate(members)},
        energy_pool=pool,
        food_id=food.id,
        degenerate=degenerate,
    )
