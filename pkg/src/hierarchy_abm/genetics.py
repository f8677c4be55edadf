"""Capability initialization, inheritance, mutation and viability clamping.

Ability is fixed for an agent's whole life; all variation enters at
birth. Inheritance is biased toward the stronger parent, mutation adds
zero-mean Gaussian noise with a configurable scale, and a viability
floor keeps every ability at or above 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .actions import Action, Sex
from .agents import Agent

ABILITY_MEAN = 100.0
VIABILITY_FLOOR = 1.0


@dataclass(frozen=True)
class CapabilityParams:
    initial_spread: float      # std dev of founding abilities around the mean
    mutation_scale: float      # std dev of the mutation perturbation
    mutation_prob: float = 0.5
    heritability: float = 0.9  # weight on the stronger parent
    mean: float = ABILITY_MEAN

    def __post_init__(self) -> None:
        if self.initial_spread < 0 or self.mutation_scale < 0:
            raise ValueError("spread parameters must be nonnegative")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must lie in [0, 1]")
        if not 0.0 <= self.heritability <= 1.0:
            raise ValueError("heritability must lie in [0, 1]")


def initial_capability(rng, spread: float, mean: float = ABILITY_MEAN) -> float:
    """Founding ability: normal around the mean, viability-clamped."""
    if spread < 0:
        raise ValueError("spread must be nonnegative")
    return max(rng.normal(mean, spread), VIABILITY_FLOOR)


def inherit(parent1: float, parent2: float, heritability: float) -> float:
    """Weighted mix of the parental maximum and the parental mean.

    The result lies between the parents' mean and their maximum for any
    heritability in [0, 1].
    """
    return heritability * max(parent1, parent2) + (1.0 - heritability) * 0.5 * (parent1 + parent2)


def mutate(value: float, mutation_prob: float, mutation_scale: float, rng) -> float:
    """With probability mutation_prob add N(0, scale^2) noise; else identity."""
    if mutation_scale < 0:
        raise ValueError("mutation_scale must be nonnegative")
    if rng.random() < mutation_prob:
        return value + rng.normal(0.0, mutation_scale)
    return value


def offspring_ability(parent1: float, parent2: float, caps: CapabilityParams, rng) -> float:
    """inherit -> mutate -> viability clamp."""
    value = inherit(parent1, parent2, caps.heritability)
    value = mutate(value, caps.mutation_prob, caps.mutation_scale, rng)
    return max(value, VIABILITY_FLOOR)


def make_offspring(parent1: Agent, parent2: Agent, caps: CapabilityParams, rng,
                   agent_id: int, birth_step: int, initial_energy: float) -> Agent:
    """New agent from a mated pair.

    Ability comes from the inherit/mutate/clamp chain, sex is uniform
    random, and the child spawns at the parents' midpoint (inside their
    shared village). Draw order per child: mutation gate, optional noise,
    sex.
    """
    ability = offspring_ability(parent1.ability, parent2.ability, caps, rng)
    sex = Sex.MALE if rng.random() < 0.5 else Sex.FEMALE
    pos = (
        0.5 * (parent1.pos[0] + parent2.pos[0]),
        0.5 * (parent1.pos[1] + parent2.pos[1]),
    )
    return Agent(
        id=agent_id,
        sex=sex,
        age=0,
        energy=initial_energy,
        pos=pos,
        ability=ability,
        action=Action.IDLE,
        birth_step=birth_step,
    )
