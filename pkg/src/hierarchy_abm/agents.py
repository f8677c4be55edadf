"""Agent state and the behavioural predicates driving action selection.

Predicates are evaluated on the committed start-of-step snapshot
(synchronous update): an agent's `action` field holds what it did in the
previous step until the new step commits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .actions import Action, Sex
from .env import Position, SensedNeighborhood, Village, distance_to_village

# Energy level separating foraging (below) from village-seeking and
# reproduction (above). Exactly at the threshold an agent does neither.
ENERGY_THRESHOLD = 10.0

# Age (in ticks) at which the mortality hazard starts ramping.
AGE_THRESHOLD = 10


@dataclass(slots=True)
class Agent:
    id: int
    sex: Sex
    age: int
    energy: float
    pos: Position
    ability: float
    action: Action = Action.IDLE
    group: tuple[int, ...] = ()
    birth_step: int = 0


def birth_rate(population: int, capacity: int, fertility: float) -> float:
    """Density-dependent per-pair birth probability, clamped below at 0.

    The population may transiently exceed capacity; the rate then stays 0
    rather than going negative.
    """
    if capacity <= 0:
        raise ValueError("capacity must be positive")
    return max(0.0, fertility * (1.0 - population / capacity))


def death_hazard(age: int, hazard_base: float, hazard_age: float) -> float:
    """Per-step hazard: flat below the age threshold, linear ramp above."""
    if age < AGE_THRESHOLD:
        return hazard_base
    return hazard_base + hazard_age * (age - (AGE_THRESHOLD - 1))


def death_probability(energy: float, age: int, hazard_base: float, hazard_age: float) -> float:
    """Probability of dying this step: certain at zero energy, else the
    Poisson survival complement of the hazard. Independent of ability."""
    if energy == 0.0:
        return 1.0
    return 1.0 - math.exp(-death_hazard(age, hazard_base, hazard_age))


def death_check(agent: Agent, rng, hazard_base: float, hazard_age: float) -> bool:
    """Draw one death decision for an agent."""
    p = death_probability(agent.energy, agent.age, hazard_base, hazard_age)
    if p >= 1.0:
        return True
    return rng.random() < p


def reproduction_predicate(i: Agent, j: Agent, villages: Sequence[Village]) -> bool:
    """Pair eligibility: both energy-rich, both inside the same village,
    both in WAIT_REPRO last step, opposite sexes."""
    if i.id == j.id:
        raise ValueError("an agent cannot pair with itself")
    if i.sex is j.sex:
        return False
    if i.energy <= ENERGY_THRESHOLD or j.energy <= ENERGY_THRESHOLD:
        return False
    if i.action is not Action.WAIT_REPRO or j.action is not Action.WAIT_REPRO:
        return False
    vi, di = distance_to_village(i.pos, villages)
    vj, dj = distance_to_village(j.pos, villages)
    radius = {v.id: v.radius for v in villages}
    return vi == vj and di <= radius[vi] and dj <= radius[vj]


def cooperation_predicate(energy: float, sensed: SensedNeighborhood) -> bool:
    """Foraging trigger: hungry, at least two IDLE neighbors, food in reach."""
    return energy < ENERGY_THRESHOLD and sensed.idle_neighbors >= 2 and sensed.accessible_food >= 1


def select_intent(agent: Agent, sensed: SensedNeighborhood, village_radius: float,
                  dies: bool = False) -> Action:
    """Action intent in fixed priority order.

    DEAD > COOPERATION > REPRODUCTION (partner-seeking) > WAIT_REPRO >
    MOVING_TO_VILLAGE > IDLE. COOPERATION and REPRODUCTION are intents:
    whether a team or pair actually forms is resolved jointly across
    agents, and unmatched agents fall through to the next priority.
    """
    if dies:
        return Action.DEAD
    if cooperation_predicate(agent.energy, sensed):
        return Action.COOPERATION
    rich = agent.energy > ENERGY_THRESHOLD
    inside = sensed.village_distance <= village_radius
    if rich and inside and agent.action is Action.WAIT_REPRO:
        return Action.REPRODUCTION
    if rich and inside:
        return Action.WAIT_REPRO
    if rich:
        return Action.MOVING_TO_VILLAGE
    return Action.IDLE


def fallthrough_intent(agent: Agent, sensed: SensedNeighborhood, village_radius: float) -> Action:
    """Intent for an agent whose joint action failed to form.

    A failed cooperation initiator is hungry, so it idles; an unmatched
    reproduction seeker is rich inside a village, so it waits.
    """
    rich = agent.energy > ENERGY_THRESHOLD
    inside = sensed.village_distance <= village_radius
    if rich and inside:
        return Action.WAIT_REPRO
    if rich:
        return Action.MOVING_TO_VILLAGE
    return Action.IDLE
