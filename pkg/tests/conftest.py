"""Shared fixtures and oracle helpers used by unit and acceptance tests."""

from __future__ import annotations

import os

import numpy as np
import pytest
from hypothesis import settings

from tsetlin._rng import CounterRng

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")
from tsetlin.automaton import Action, TAState
from tsetlin.clauses import ClauseTeam, LiteralVector, team_index
from tsetlin.feedback import FeedbackParams, apply_type_i, type_i_probs

DATA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "data")
IRIS_CSV = os.path.join(DATA_DIR, "iris.csv")
DIGITS_CSV = os.path.join(DATA_DIR, "digits.csv")


@pytest.fixture(scope="session")
def iris_csv() -> str:
    return IRIS_CSV


@pytest.fixture(scope="session")
def digits_csv() -> str:
    return DIGITS_CSV


def team_from_values(values, half_range, polarity=1, o=None):
    """ClauseTeam from planar-ordered state values."""
    o = o if o is not None else len(values) // 2
    states = [None] * (2 * o)
    for pos, v in enumerate(values):
        states[team_index(pos, o)] = TAState(int(v), half_range)
    return ClauseTeam(tuple(states), polarity)


def team_values(team):
    """Planar-ordered state values of a ClauseTeam."""
    return np.array(
        [team.state_for_position(p).value for p in range(2 * team.width)]
    )


def type_i_cell_frequencies(action, literal, clause_out, s, boost, trials, seed=404):
    """Observed (reward, penalty) frequencies of one Type I table cell.

    Runs `trials` independent applications of apply_type_i on a width-2 team
    crafted so that position 0 realizes the requested (action, literal) under
    the requested clause output, and classifies position 0's state change.
    """
    half = 8  # b=4; keep the observed automaton away from saturation
    start = half + 2 if action == Action.INCLUDE else half - 3
    x0 = literal  # position 0 is literal x1
    # position 1 (x2) keeps the clause consistent: for clause=1 everything
    # included must be true; excluded-at-deep keeps it out of the way.
    values = [start, half - 3, half - 3, half - 3]
    if clause_out == 1 and action == Action.INCLUDE and literal == 0:
        raise AssertionError("unreachable cell by construction")
    team = team_from_values(values, half)
    lits = LiteralVector.from_input(np.array([x0, 1], dtype=np.uint8))
    params = FeedbackParams(s, boost)
    rng = CounterRng(seed)
    up = down = 0
    for t in range(trials):
        out = apply_type_i(team, lits, clause_out, params, rng, clause_index=0, step=t)
        v = out.state_for_position(0).value
        if v > start:
            up += 1
        elif v < start:
            down += 1
    if action == Action.INCLUDE:
        return up / trials, down / trials  # reward deepens, penalty retreats
    return down / trials, up / trials


def binomial_3sigma(p: float, n: int) -> float:
    return 3.0 * np.sqrt(max(p * (1.0 - p), 1e-12) / n)


def expected_cell(action, literal, clause, s, boost):
    cell = type_i_probs(action, literal, clause, FeedbackParams(s, boost))
    return cell.p_reward, cell.p_penalty
