"""Agent action states and sexes (dependency-free leaf module)."""

from __future__ import annotations

from enum import Enum


class Action(Enum):
    DEAD = "dead"
    MOVING_TO_VILLAGE = "moving_to_village"
    IDLE = "idle"
    WAIT_REPRO = "wait_repro"
    REPRODUCTION = "reproduction"
    COOPERATION = "cooperation"


class Sex(Enum):
    MALE = "male"
    FEMALE = "female"
