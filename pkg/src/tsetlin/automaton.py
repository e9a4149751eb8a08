"""Scalar two-action Tsetlin Automaton: state encoding and transitions.

States are encoded 0 .. 2N-1 with the Include action occupying the upper
half, so that in the packed engine the action is literally the most
significant bit of a b-bit state with 2N = 2**b.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .errors import ConfigError


class Action(IntEnum):
    EXCLUDE = 0
    INCLUDE = 1


class Event(IntEnum):
    INACTION = 0
    REWARD = 1
    PENALTY = 2


@dataclass(frozen=True)
class TAState:
    """One automaton: integer state in [0, 2N-1], N states per action."""

    value: int
    half_range: int

    def __post_init__(self):
        if self.half_range < 1:
            raise ConfigError(f"half_range must be >= 1, got {self.half_range}")
        if not 0 <= self.value <= 2 * self.half_range - 1:
            raise ConfigError(
                f"state value {self.value} outside [0, {2 * self.half_range - 1}]"
            )


def ta_action(state: TAState) -> Action:
    return Action.INCLUDE if state.value >= state.half_range else Action.EXCLUDE


def ta_apply(state: TAState, event: Event) -> TAState:
    """Transition on reward/penalty/inaction.

    Reward deepens the current action (saturating at 0 and 2N-1); penalty
    moves toward and across the action boundary; inaction leaves the state
    untouched. Penalty at a saturated state gets no special case.
    """
    v, n = state.value, state.half_range
    if event == Event.INACTION:
        return state
    include = v >= n
    if event == Event.REWARD:
        v = min(v + 1, 2 * n - 1) if include else max(v - 1, 0)
    else:
        v = v - 1 if include else v + 1
    return TAState(v, n)


def boundary_state(half_range: int, include: bool) -> TAState:
    """Initial state: at the action boundary, action chosen by the caller's coin."""
    return TAState(half_range if include else half_range - 1, half_range)
