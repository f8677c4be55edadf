"""World state and the synchronous step function.

Each step reads a frozen start-of-step snapshot, selects per-agent
intents, resolves joint actions (3-agent cooperation teams, 2-agent
reproduction pairs), and only then mutates the world in a fixed commit
order. All stochastic decisions are keyed by (seed, step, purpose,
entity id), so the committed state is independent of agent storage
order and a (params, seed) pair maps to exactly one trajectory.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import env as env_mod
from .actions import Action, Sex
from .agents import AGE_THRESHOLD, ENERGY_THRESHOLD, Agent, birth_rate
from .config import ModelParams
from .cooperation import InteractionLedger, execute_cooperation
from .genetics import initial_capability, make_offspring
from .rng import (
    TAG_COOP,
    TAG_DEATH,
    TAG_INIT,
    TAG_REGEN,
    TAG_REPRO,
    KeyedStream,
    generator,
    keyed_uniforms,
    mix64,
)

# intent codes for the vectorized step path; priority is the enum order
I_DEAD, I_COOP, I_REPRO, I_WAIT, I_MOVE, I_IDLE = range(6)

_INTENT_ACTION = {
    I_DEAD: Action.DEAD,
    I_COOP: Action.COOPERATION,
    I_REPRO: Action.REPRODUCTION,
    I_WAIT: Action.WAIT_REPRO,
    I_MOVE: Action.MOVING_TO_VILLAGE,
    I_IDLE: Action.IDLE,
}


class World:
    """Mutable simulation state for one replicate."""

    def __init__(self, params: ModelParams, seed: int, agents: dict[int, Agent],
                 food: list[env_mod.FoodItem]):
        self.params = params
        self.seed = seed
        self.t = 0
        self.agents = agents
        self.dead: dict[int, Agent] = {}
        self.food = food
        self.arena = params.arena()
        self.villages = params.villages()
        self.ledger = InteractionLedger()
        self.next_agent_id = (max(agents) + 1) if agents else 0
        self.births = 0
        self.deaths = 0
        self.aborted_events = 0
        self.degenerate_allocations = 0
        self._caps = params.capability()
        self._village_centers = np.array([v.center for v in self.villages])
        self._village_radii = np.array([v.radius for v in self.villages])
        self._village_ids = np.array([v.id for v in self.villages])
        self._static_version = 0
        self._static_cache: tuple | None = None

    def touch(self) -> None:
        """Invalidate cached per-agent arrays. step() handles its own
        invalidation; call this after mutating agents from outside."""
        self._static_version += 1

    @classmethod
    def create(cls, params: ModelParams, seed: int) -> "World":
        """Founding world: uniform positions, uniform sexes, abilities
        drawn around the capability mean with the configured spread."""
        rng = generator(mix64(seed, TAG_INIT))
        agents: dict[int, Agent] = {}
        for i in range(params.n_initial):
            pos = (rng.uniform(0.0, params.arena_width), rng.uniform(0.0, params.arena_height))
            sex = Sex.MALE if rng.random() < 0.5 else Sex.FEMALE
            ability = initial_capability(rng, params.initial_spread)
            agents[i] = Agent(
                id=i, sex=sex, age=0, energy=params.initial_energy,
                pos=pos, ability=ability, action=Action.IDLE,
            )
        food = [
            env_mod.FoodItem(
                id=j,
                pos=(rng.uniform(0.0, params.arena_width), rng.uniform(0.0, params.arena_height)),
            )
            for j in range(params.n_food)
        ]
        return cls(params, seed, agents, food)

    def population(self) -> int:
        return len(self.agents)

    def alive_ids(self) -> set[int]:
        return set(self.agents)

    def digest(self) -> str:
        """Stable fingerprint of the full world state (bit-exact floats)."""
        parts: list[str] = [
            f"t={self.t}",
            f"next={self.next_agent_id}",
            f"births={self.births}",
            f"deaths={self.deaths}",
            f"aborted={self.aborted_events}",
            f"degenerate={self.degenerate_allocations}",
        ]
        for aid in sorted(self.agents):
            a = self.agents[aid]
            parts.append(
                f"A|{a.id}|{a.sex.value}|{a.age}|{a.energy.hex()}|{a.pos[0].hex()}|"
                f"{a.pos[1].hex()}|{a.ability.hex()}|{a.action.value}|{a.group}|{a.birth_step}"
            )
        for aid in sorted(self.dead):
            a = self.dead[aid]
            parts.append(f"D|{a.id}|{a.sex.value}|{a.age}|{a.ability.hex()}|{a.birth_step}")
        for item in self.food:
            parts.append(f"F|{item.id}|{item.pos[0].hex()}|{item.pos[1].hex()}|{item.available}")
        for (listener, speaker), count in sorted(self.ledger.counts.items()):
            parts.append(f"W|{listener}|{speaker}|{count}")
        return hashlib.sha256("\n".join(parts).encode()).hexdigest()


@dataclass
class _Snapshot:
    """Start-of-step arrays, index-aligned over sorted agent ids."""

    ids: list[int]
    id_arr: np.ndarray
    pos: np.ndarray
    energy: np.ndarray
    age: np.ndarray
    ability: np.ndarray
    is_idle: np.ndarray
    was_wait: np.ndarray
    is_male: np.ndarray

    @property
    def n(self) -> int:
        return len(self.ids)


def _snapshot(world: World) -> _Snapshot:
    ids = sorted(world.agents)
    n = len(ids)
    cache = world._static_cache
    if cache is not None and cache[0] == world._static_version and cache[1] == ids:
        agents, id_arr, age, ability, is_male = cache[2:]
    else:
        # ids, sex, age and ability only change on birth, death or an age
        # tick, all of which bump the static version
        agents = [world.agents[i] for i in ids]
        id_arr = np.fromiter((a.id for a in agents), dtype=np.int64, count=n)
        age = np.fromiter((a.age for a in agents), dtype=np.int64, count=n)
        ability = np.fromiter((a.ability for a in agents), dtype=np.float64, count=n)
        is_male = np.fromiter((a.sex is Sex.MALE for a in agents), dtype=bool, count=n)
        world._static_cache = (world._static_version, ids, agents, id_arr, age, ability, is_male)
    return _Snapshot(
        ids=ids,
        id_arr=id_arr,
        pos=np.array([a.pos for a in agents], dtype=np.float64).reshape(n, 2),
        energy=np.fromiter((a.energy for a in agents), dtype=np.float64, count=n),
        age=age,
        ability=ability,
        is_idle=np.fromiter((a.action is Action.IDLE for a in agents), dtype=bool, count=n),
        was_wait=np.fromiter((a.action is Action.WAIT_REPRO for a in agents), dtype=bool, count=n),
        is_male=is_male,
    )


def _death_mask(world: World, snap: _Snapshot) -> np.ndarray:
    p = world.params
    hazard = np.where(
        snap.age < AGE_THRESHOLD,
        p.hazard_base,
        p.hazard_base + p.hazard_age * (snap.age - (AGE_THRESHOLD - 1)),
    )
    p_die = np.where(snap.energy == 0.0, 1.0, 1.0 - np.exp(-hazard))
    draws = keyed_uniforms(mix64(world.seed, world.t, TAG_DEATH), snap.id_arr)
    return draws < p_die


def _village_geometry(world: World, snap: _Snapshot) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(nearest village index, distance to its center, inside flag)."""
    diffs = snap.pos[:, None, :] - world._village_centers[None, :, :]
    vdist = np.sqrt((diffs**2).sum(axis=2))
    nearest = vdist.argmin(axis=1)
    dv = vdist[np.arange(snap.n), nearest]
    inside = dv <= world._village_radii[nearest]
    return nearest, dv, inside


def _sensing_counts(world: World, snap: _Snapshot, hungry: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """IDLE-neighbor and accessible-food counts, filled only where hungry
    (the only intents that read them)."""
    p = world.params
    nu = np.zeros(snap.n, dtype=np.int64)
    mu = np.zeros(snap.n, dtype=np.int64)
    h_idx = np.flatnonzero(hungry)
    if h_idx.size == 0:
        return nu, mu
    idle_idx = np.flatnonzero(snap.is_idle)
    if idle_idx.size:
        d = np.sqrt(((snap.pos[h_idx][:, None, :] - snap.pos[idle_idx][None, :, :]) ** 2).sum(axis=2))
        same = snap.id_arr[h_idx][:, None] == snap.id_arr[idle_idx][None, :]
        nu[h_idx] = ((d <= p.neighbor_radius) & ~same).sum(axis=1)
    avail_pos = np.array([item.pos for item in world.food if item.available], dtype=np.float64)
    if avail_pos.size:
        d = np.sqrt(((snap.pos[h_idx][:, None, :] - avail_pos[None, :, :]) ** 2).sum(axis=2))
        mu[h_idx] = (d <= p.food_radius).sum(axis=1)
    return nu, mu


def _intents(snap: _Snapshot, dies: np.ndarray, inside: np.ndarray,
             nu: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Vectorized twin of agents.select_intent."""
    rich = snap.energy > ENERGY_THRESHOLD
    hungry = snap.energy < ENERGY_THRESHOLD
    intents = np.full(snap.n, I_IDLE, dtype=np.int8)
    intents[rich] = I_MOVE
    intents[rich & inside] = I_WAIT
    intents[rich & inside & snap.was_wait] = I_REPRO
    intents[hungry & (nu >= 2) & (mu >= 1)] = I_COOP
    intents[dies] = I_DEAD
    return intents


def _resolve_cooperation(world: World, snap: _Snapshot, intents: np.ndarray,
                         dies: np.ndarray, committed: np.ndarray) -> list[tuple[int, int, int]]:
    """Form 3-agent teams in ascending initiator-id order.

    Recruits must have been IDLE at the snapshot, survive this step, be
    uncommitted, and sit inside the sensing radius that licensed the
    trigger; the two nearest qualify, ties to the lower id.
    """
    p = world.params
    teams: list[tuple[int, int, int]] = []
    recruitable = snap.is_idle & ~dies
    for k in np.flatnonzero(intents == I_COOP):
        if committed[k]:
            continue
        cand = np.flatnonzero(recruitable & ~committed)
        cand = cand[cand != k]
        if cand.size < 2:
            continue
        d = np.sqrt(((snap.pos[cand] - snap.pos[k]) ** 2).sum(axis=1))
        near_mask = d <= p.neighbor_radius
        near = cand[near_mask]
        if near.size < 2:
            continue
        order = np.lexsort((snap.id_arr[near], d[near_mask]))
        r1, r2 = int(near[order[0]]), int(near[order[1]])
        committed[[k, r1, r2]] = True
        teams.append((snap.ids[k], snap.ids[r1], snap.ids[r2]))
    return teams


def _resolve_reproduction(world: World, snap: _Snapshot, intents: np.ndarray,
                          nearest: np.ndarray, committed: np.ndarray) -> list[tuple[int, int]]:
    """Pair opposite-sex seekers inside the same village, greedily by
    distance with id tie-breaks."""
    eligible = (intents == I_REPRO) & ~committed
    e_idx = np.flatnonzero(eligible)
    if e_idx.size < 2:
        return []
    pairs: list[tuple[int, int]] = []
    for village in np.unique(nearest[e_idx]):
        members = e_idx[nearest[e_idx] == village]
        males = members[snap.is_male[members]]
        females = members[~snap.is_male[members]]
        if males.size == 0 or females.size == 0:
            continue
        delta = snap.pos[males][:, None, :] - snap.pos[females][None, :, :]
        d = np.sqrt((delta**2).sum(axis=2)).ravel()
        male_ids = np.repeat(snap.id_arr[males], females.size)
        female_ids = np.tile(snap.id_arr[females], males.size)
        lo = np.minimum(male_ids, female_ids)
        hi = np.maximum(male_ids, female_ids)
        order = np.lexsort((hi, lo, d))
        male_pos = np.repeat(males, females.size)[order].tolist()
        female_pos = np.tile(females, males.size)[order].tolist()
        lo_ids = lo[order].tolist()
        hi_ids = hi[order].tolist()
        taken = committed.view()
        remaining = min(males.size, females.size)
        for a, b, lo_id, hi_id in zip(male_pos, female_pos, lo_ids, hi_ids):
            if taken[a] or taken[b]:
                continue
            taken[a] = True
            taken[b] = True
            pairs.append((lo_id, hi_id))
            remaining -= 1
            if remaining == 0:
                break
    pairs.sort()
    return pairs


def step(world: World) -> World:
    """Advance the world one synchronous tick."""
    p = world.params
    t = world.t
    snap = _snapshot(world)
    n = snap.n

    if n:
        dies = _death_mask(world, snap)
        nearest, _, inside = _village_geometry(world, snap)
        hungry = snap.energy < ENERGY_THRESHOLD
        nu, mu = _sensing_counts(world, snap, hungry)
        intents = _intents(snap, dies, inside, nu, mu)

        committed = np.zeros(n, dtype=bool)
        teams = _resolve_cooperation(world, snap, intents, dies, committed)
        pairs = _resolve_reproduction(world, snap, intents, nearest, committed)

        # deaths commit first; the dead take no further part in this step
        dying = np.flatnonzero(dies)
        if dying.size:
            world._static_version += 1
        for k in dying:
            agent = world.agents.pop(snap.ids[k])
            agent.action = Action.DEAD
            agent.group = ()
            world.dead[agent.id] = agent
            world.deaths += 1

        new_actions: dict[int, tuple[Action, tuple[int, ...]]] = {}

        for q, (initiator, r1, r2) in enumerate(teams):
            team = tuple(sorted((initiator, r1, r2)))
            execute_cooperation(world, initiator, team, KeyedStream(mix64(world.seed, t, TAG_COOP, initiator)), q)
            for member in team:
                new_actions[member] = (Action.COOPERATION, team)

        rate = birth_rate(n, p.capacity, p.fertility)
        sorted_ability = np.sort(snap.ability)
        newborns: list[Agent] = []
        for lo, hi in pairs:
            # at rate == 0 the gate below cannot pass; skip the draw
            if rate > 0.0 and KeyedStream(mix64(world.seed, t, TAG_REPRO, lo)).random() < rate:
                pair_rng = KeyedStream(mix64(world.seed, t, TAG_REPRO, lo, 1))
                mean_ability = 0.5 * (world.agents[lo].ability + world.agents[hi].ability)
                advantage = np.searchsorted(sorted_ability, mean_ability, side="right") / n
                count = 1 + int(pair_rng.random() < advantage)
                for _ in range(count):
                    newborns.append(make_offspring(
                        world.agents[lo], world.agents[hi], world._caps, pair_rng,
                        agent_id=world.next_agent_id, birth_step=t + 1,
                        initial_energy=p.offspring_energy,
                    ))
                    world.next_agent_id += 1
                world.agents[lo].energy -= p.repro_cost
                world.agents[hi].energy -= p.repro_cost
                world.births += count
            new_actions[lo] = (Action.REPRODUCTION, (lo, hi))
            new_actions[hi] = (Action.REPRODUCTION, (lo, hi))

        moved = (intents == I_MOVE) & ~dies & ~committed
        for k in np.flatnonzero(moved):
            agent = world.agents[snap.ids[k]]
            target = world.villages[nearest[k]].center
            agent.pos = env_mod.move_step(agent.pos, target, p.speed, world.arena)

        # single commit pass: energy drain, floor at zero, action write
        rich = snap.energy > ENERGY_THRESHOLD
        for k in range(n):
            if dies[k]:
                continue
            aid = snap.ids[k]
            agent = world.agents[aid]
            cost = p.metabolic_cost + (p.move_cost if moved[k] else 0.0)
            agent.energy = max(0.0, agent.energy - cost)
            assigned = new_actions.get(aid)
            if assigned is not None:
                agent.action, agent.group = assigned
            else:
                code = intents[k]
                if code in (I_COOP, I_REPRO):
                    # joint action failed to form: fall through the priority list
                    if rich[k] and inside[k]:
                        code = I_WAIT
                    elif rich[k]:
                        code = I_MOVE
                    else:
                        code = I_IDLE
                agent.action = _INTENT_ACTION[code]
                agent.group = ()
    else:
        newborns = []

    env_mod.regenerate_food(world, KeyedStream(mix64(world.seed, t, TAG_REGEN)), p.regen_rate)

    world.t = t + 1
    if p.age_tick_interval > 0 and world.t % p.age_tick_interval == 0:
        world._static_version += 1
        for agent in world.agents.values():
            agent.age += 1
    if newborns:
        world._static_version += 1
        for child in newborns:
            world.agents[child.id] = child
    return world


def run(world: World, steps: int) -> World:
    for _ in range(steps):
        step(world)
    return world
