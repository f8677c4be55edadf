"""Spatial environment: arena, villages, food items, proximity sensing.

All distances are plain Euclidean. "Within radius r" is inclusive
(d <= r), and an agent counts as inside a village when its distance to
the village center does not exceed the village radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .actions import Action

Position = tuple[float, float]


@dataclass(frozen=True)
class Arena:
    width: float
    height: float

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("arena dimensions must be positive")

    def clamp(self, pos: Position) -> Position:
        x = min(max(pos[0], 0.0), self.width)
        y = min(max(pos[1], 0.0), self.height)
        return (x, y)

    def contains(self, pos: Position) -> bool:
        return 0.0 <= pos[0] <= self.width and 0.0 <= pos[1] <= self.height


@dataclass(frozen=True)
class Village:
    id: int
    center: Position
    radius: float

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError("village radius must be positive")


@dataclass
class FoodItem:
    id: int
    pos: Position
    available: bool = True


@dataclass(frozen=True)
class SensedNeighborhood:
    """Start-of-step local view of one agent."""

    idle_neighbors: int      # living IDLE agents within the neighbor radius
    accessible_food: int     # available food items within the food radius
    village_distance: float  # distance to the nearest village center
    nearest_village: int     # id of that village


def distance_to_village(pos: Position, villages: Sequence[Village]) -> tuple[int, float]:
    """Nearest village id and center distance; distance ties take the lower id.

    The agent is inside the returned village iff the distance does not
    exceed that village's radius.
    """
    if not villages:
        raise ValueError("no villages in world")
    best_id = villages[0].id
    best_d = math.dist(pos, villages[0].center)
    for v in villages[1:]:
        d = math.dist(pos, v.center)
        if d < best_d or (d == best_d and v.id < best_id):
            best_id, best_d = v.id, d
    return best_id, best_d


def sense(agent_pos: Position, world, neighbor_radius: float, food_radius: float,
          exclude_id: int | None = None) -> SensedNeighborhood:
    """Count IDLE neighbors and accessible food around one position.

    Pure function of the world passed in; counts use the agents' current
    (start-of-step) action states. `exclude_id` removes the sensing agent
    itself from the neighbor count.
    """
    idle = 0
    for agent in world.agents.values():
        if agent.id == exclude_id or agent.action is not Action.IDLE:
            continue
        if math.dist(agent_pos, agent.pos) <= neighbor_radius:
            idle += 1
    food = 0
    for item in world.food:
        if item.available and math.dist(agent_pos, item.pos) <= food_radius:
            food += 1
    village_id, dv = distance_to_village(agent_pos, world.villages)
    return SensedNeighborhood(idle, food, dv, village_id)


def move_step(pos: Position, target: Position, speed: float, arena: Arena) -> Position:
    """Advance min(speed, distance) toward target, clamped to the arena."""
    if speed <= 0:
        raise ValueError("speed must be positive")
    d = math.dist(pos, target)
    if d <= speed:
        return arena.clamp(target)
    frac = speed / d
    new = (pos[0] + (target[0] - pos[0]) * frac, pos[1] + (target[1] - pos[1]) * frac)
    return arena.clamp(new)


def regenerate_food(world, rng, regen_rate: float) -> None:
    """Restore each consumed item with probability regen_rate at a fresh
    uniform position.

    Items are visited in id order so one per-step generator gives a
    reproducible draw sequence.
    """
    if not 0.0 <= regen_rate <= 1.0:
        raise ValueError("regen_rate must lie in [0, 1]")
    arena = world.arena
    for item in world.food:
        if item.available:
            continue
        if rng.random() < regen_rate:
            item.available = True
            item.pos = (rng.uniform(0.0, arena.width), rng.uniform(0.0, arena.height))


def default_villages(centers: Iterable[Position], radius: float) -> list[Village]:
    """Villages with ids 1..n from a center list."""
    return [Village(i + 1, (float(x), float(y)), radius) for i, (x, y) in enumerate(centers)]
