"""Behavioural predicate contracts: birth rate, mortality, pairing,
foraging trigger, and intent priority."""

import math

import pytest

from hierarchy_abm.actions import Action, Sex
from hierarchy_abm.agents import (
    Agent,
    birth_rate,
    cooperation_predicate,
    death_check,
    death_probability,
    fallthrough_intent,
    reproduction_predicate,
    select_intent,
)
from hierarchy_abm.env import SensedNeighborhood, Village
from hierarchy_abm.rng import generator


def agent(aid=0, sex=Sex.MALE, age=0, energy=15.0, pos=(10.0, 10.0),
          ability=100.0, action=Action.IDLE):
    return Agent(id=aid, sex=sex, age=age, energy=energy, pos=pos,
                 ability=ability, action=action)


def test_birth_rate_at_capacity_is_zero():
    assert birth_rate(100, 100, 0.8) == 0.0


def test_birth_rate_empty_population():
    assert birth_rate(0, 100, 0.8) == 0.8


def test_birth_rate_midpoint():
    assert birth_rate(50, 100, 0.5) == pytest.approx(0.25, abs=1e-12)


def test_birth_rate_clamped_above_capacity():
    assert birth_rate(150, 100, 0.8) == 0.0


def test_birth_rate_invalid_capacity():
    with pytest.raises(ValueError):
        birth_rate(10, 0, 0.5)


def test_death_certain_at_zero_energy():
    assert death_probability(0.0, 0, 0.0, 0.0) == 1.0
    assert death_check(agent(energy=0.0), generator(1), 0.0, 0.0)


def test_death_zero_hazard_survives():
    assert death_probability(5.0, 5, 0.0, 0.05) == 0.0
    assert not death_check(agent(age=5, energy=5.0), generator(1), 0.0, 0.05)


def test_death_hazard_formula_above_age_threshold():
    # flat hazard below the threshold, linear ramp above it
    p = death_probability(5.0, 12, 0.001, 0.05)
    assert p == pytest.approx(1.0 - math.exp(-0.151), abs=1e-12)
    assert death_probability(5.0, 9, 0.001, 0.05) == pytest.approx(
        1.0 - math.exp(-0.001), abs=1e-15)


def test_death_hazard_independent_of_ability():
    lo = agent(ability=1.0, age=12, energy=5.0)
    hi = agent(ability=500.0, age=12, energy=5.0)
    assert death_probability(lo.energy, lo.age, 0.001, 0.05) == \
        death_probability(hi.energy, hi.age, 0.001, 0.05)


VILLAGES = [Village(1, (10.0, 10.0), 5.0), Village(2, (40.0, 10.0), 5.0)]


def _pair(**overrides):
    base = dict(energy_i=15.0, energy_j=15.0, sex_j=Sex.FEMALE,
                pos_i=(10.0, 10.0), pos_j=(11.0, 10.0),
                action_i=Action.WAIT_REPRO, action_j=Action.WAIT_REPRO)
    base.update(overrides)
    i = agent(0, sex=Sex.MALE, energy=base["energy_i"], pos=base["pos_i"], action=base["action_i"])
    j = agent(1, sex=base["sex_j"], energy=base["energy_j"], pos=base["pos_j"], action=base["action_j"])
    return i, j


def test_reproduction_all_conditions_hold():
    assert reproduction_predicate(*_pair(), VILLAGES)


def test_reproduction_strict_energy_inequality():
    assert not reproduction_predicate(*_pair(energy_i=10.0), VILLAGES)
    assert not reproduction_predicate(*_pair(energy_j=10.0), VILLAGES)


def test_reproduction_same_sex_fails():
    assert not reproduction_predicate(*_pair(sex_j=Sex.MALE), VILLAGES)


def test_reproduction_requires_same_village():
    assert not reproduction_predicate(*_pair(pos_j=(40.0, 10.0)), VILLAGES)


def test_reproduction_requires_wait_state():
    assert not reproduction_predicate(*_pair(action_i=Action.IDLE), VILLAGES)


def test_reproduction_requires_inside_village():
    assert not reproduction_predicate(*_pair(pos_i=(20.0, 10.0), pos_j=(21.0, 10.0)), VILLAGES)


def test_reproduction_rejects_self_pairing():
    i, _ = _pair()
    with pytest.raises(ValueError):
        reproduction_predicate(i, i, VILLAGES)


def sensed(nu=0, mu=0, dv=100.0, village=1):
    return SensedNeighborhood(nu, mu, dv, village)


def test_cooperation_trigger():
    assert cooperation_predicate(5.0, sensed(nu=2, mu=1))


def test_cooperation_energy_boundary_strict():
    assert not cooperation_predicate(10.0, sensed(nu=5, mu=5))


def test_cooperation_needs_two_neighbors():
    assert not cooperation_predicate(5.0, sensed(nu=1, mu=3))


def test_cooperation_needs_food():
    assert not cooperation_predicate(5.0, sensed(nu=3, mu=0))


def test_intent_default_is_idle():
    a = agent(energy=5.0)
    assert select_intent(a, sensed(), 5.0) is Action.IDLE


def test_intent_wait_repro_inside_village():
    a = agent(energy=15.0)
    assert select_intent(a, sensed(dv=3.0), 5.0) is Action.WAIT_REPRO


def test_intent_death_has_priority():
    a = agent(energy=5.0)
    assert select_intent(a, sensed(nu=5, mu=5), 5.0, dies=True) is Action.DEAD


def test_intent_cooperation_beats_reproduction():
    a = agent(energy=5.0, action=Action.WAIT_REPRO)
    assert select_intent(a, sensed(nu=2, mu=1, dv=1.0), 5.0) is Action.COOPERATION


def test_intent_reproduction_seek_after_wait():
    a = agent(energy=15.0, action=Action.WAIT_REPRO)
    assert select_intent(a, sensed(dv=1.0), 5.0) is Action.REPRODUCTION


def test_intent_moving_when_rich_and_outside():
    a = agent(energy=15.0)
    assert select_intent(a, sensed(dv=20.0), 5.0) is Action.MOVING_TO_VILLAGE


def test_intent_boundary_prefers_wait():
    # at distance exactly R both inside and moving conditions hold
    a = agent(energy=15.0)
    assert select_intent(a, sensed(dv=5.0), 5.0) is Action.WAIT_REPRO


def test_fallthrough_unmatched_seeker_waits():
    a = agent(energy=15.0, action=Action.WAIT_REPRO)
    assert fallthrough_intent(a, sensed(dv=1.0), 5.0) is Action.WAIT_REPRO


def test_fallthrough_failed_initiator_idles():
    a = agent(energy=5.0)
    assert fallthrough_intent(a, sensed(nu=5, mu=5), 5.0) is Action.IDLE
