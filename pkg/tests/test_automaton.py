import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsetlin.automaton import (
    Action,
    Event,
    TAState,
    boundary_state,
    ta_action,
    ta_apply,
)
from tsetlin.errors import ConfigError


def test_action_boundaries():
    assert ta_action(TAState(127, 128)) == Action.EXCLUDE
    assert ta_action(TAState(128, 128)) == Action.INCLUDE
    assert ta_action(TAState(5, 3)) == Action.INCLUDE
    assert ta_action(TAState(0, 1)) == Action.EXCLUDE


def test_apply_examples():
    assert ta_apply(TAState(255, 128), Event.REWARD).value == 255  # saturated
    flipped = ta_apply(TAState(128, 128), Event.PENALTY)
    assert flipped.value == 127 and ta_action(flipped) == Action.EXCLUDE
    assert ta_apply(TAState(40, 128), Event.INACTION).value == 40
    assert ta_apply(TAState(40, 128), Event.REWARD).value == 39
    assert ta_apply(TAState(0, 128), Event.REWARD).value == 0  # floor saturation
    assert ta_apply(TAState(0, 128), Event.PENALTY).value == 1


def test_invalid_states_rejected():
    with pytest.raises(ConfigError):
        TAState(-1, 4)
    with pytest.raises(ConfigError):
        TAState(8, 4)
    with pytest.raises(ConfigError):
        TAState(0, 0)


def test_boundary_state():
    assert boundary_state(64, include=False).value == 63
    assert boundary_state(64, include=True).value == 64


states = st.integers(1, 64).flatmap(
    lambda n: st.tuples(st.integers(0, 2 * n - 1), st.just(n))
)


@given(states, st.sampled_from(list(Event)))
def test_result_stays_in_range(sv, event):
    v, n = sv
    out = ta_apply(TAState(v, n), event)
    assert 0 <= out.value <= 2 * n - 1


@given(states)
def test_reward_then_penalty_round_trip(sv):
    v, n = sv
    state = TAState(v, n)
    if v not in (0, 2 * n - 1):  # saturated states absorb rewards
        assert ta_apply(ta_apply(state, Event.REWARD), Event.PENALTY) == state
    if v not in (n - 1, n):  # boundary states flip action under penalty
        assert ta_apply(ta_apply(state, Event.PENALTY), Event.REWARD) == state


@given(states)
def test_reward_run_saturates(sv):
    v, n = sv
    state = TAState(v, n)
    for _ in range(2 * n):
        state = ta_apply(state, Event.REWARD)
    assert state.value in (0, 2 * n - 1)


@given(states, st.sampled_from(list(Event)))
def test_action_flips_only_at_boundary(sv, event):
    v, n = sv
    state = TAState(v, n)
    out = ta_apply(state, event)
    if ta_action(out) != ta_action(state):
        assert {state.value, out.value} == {n - 1, n}
