"""Type I / Type II feedback tables and their stochastic application.

Type I combats false negatives: it rewards literal inclusion that keeps a
matching clause true and gently erodes everything else, at a granularity set
by s. Type II combats false positives: it deterministically pushes toward
including one of the literals that would force an offending clause to 0.

Every automaton draws its reward uniform first and its penalty uniform
second (the canonical order); both draws are random-access functions of
(seed, stream, presentation, clause, position), so scalar and packed
training consume identical randomness.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _rng
from .automaton import Action, Event, ta_action, ta_apply
from .clauses import (
    ClauseTeam,
    LiteralVector,
    PlaneBlock,
    block_decrement,
    block_increment,
    n_words,
    team_index,
    valid_words,
)
from .errors import ConfigError, WidthMismatchError


@dataclass(frozen=True)
class FeedbackParams:
    """s > 1 controls granularity; boost strengthens true-positive inclusion."""

    s: float
    boost: bool = False

    def __post_init__(self):
        if not self.s > 1.0:
            raise ConfigError(f"s must be > 1, got {self.s}")


@dataclass(frozen=True)
class FeedbackTriple:
    p_reward: float
    p_inaction: float
    p_penalty: float

    def __post_init__(self):
        total = self.p_reward + self.p_inaction + self.p_penalty
        if abs(total - 1.0) > 1e-12:
            raise ConfigError(f"feedback probabilities sum to {total}, not 1")


_INACTION = FeedbackTriple(0.0, 1.0, 0.0)


def type_i_probs(
    action: Action, literal: int, clause: int, params: FeedbackParams
) -> FeedbackTriple:
    """Type I feedback cell for one automaton.

    The (Include, literal=0, clause=1) cell is unreachable (an included false
    literal forces the clause to 0); queried defensively it is pure inaction.
    """
    lo, hi = 1.0 / params.s, (params.s - 1.0) / params.s
    if clause and literal:
        if params.boost:
            hi, lo = 1.0, 0.0
        if action == Action.INCLUDE:
            return FeedbackTriple(hi, lo, 0.0)
        return FeedbackTriple(0.0, lo, hi)
    if action == Action.INCLUDE:
        if clause:  # literal == 0: the unreachable cell
            return _INACTION
        return FeedbackTriple(0.0, hi, lo)
    return FeedbackTriple(lo, hi, 0.0)


def type_ii_probs(action: Action, literal: int, clause: int) -> FeedbackTriple:
    """Type II feedback cell: a certain penalty for the excluded false literal
    of a clause that wrongly evaluates to 1; inaction everywhere else."""
    if clause and not literal and action == Action.EXCLUDE:
        return FeedbackTriple(0.0, 0.0, 1.0)
    return _INACTION


@lru_cache(maxsize=64)
def threshold_tables(params: FeedbackParams) -> tuple[np.ndarray, np.ndarray]:
    """Type I draw thresholds indexed [action, literal, clause] as u63 integers.

    Cached per parameter set; callers treat the returned arrays as read-only."""
    thr_r = np.zeros((2, 2, 2), dtype=np.uint64)
    thr_p = np.zeros((2, 2, 2), dtype=np.uint64)
    for action in (Action.EXCLUDE, Action.INCLUDE):
        for literal in (0, 1):
            for clause in (0, 1):
                cell = type_i_probs(action, literal, clause, params)
                thr_r[action, literal, clause] = _rng.threshold_u63(cell.p_reward)
                thr_p[action, literal, clause] = _rng.threshold_u63(cell.p_penalty)
    return thr_r, thr_p


def _check_width(width: int, literals: LiteralVector):
    if width != literals.width:
        raise WidthMismatchError(
            f"clause width {width} != literal width {literals.width}"
        )


def _draw_event(
    rng, thr_reward: int, thr_penalty: int, step: int, clause_index: int, position: int
) -> Event:
    sub = _rng.clause_sub(clause_index, position)
    if rng.u63(_rng.STREAM_REWARD, step, sub) < thr_reward:
        return Event.REWARD
    if rng.u63(_rng.STREAM_PENALTY, step, sub) < thr_penalty:
        return Event.PENALTY
    return Event.INACTION


def apply_type_i(
    target: ClauseTeam | PlaneBlock,
    literals: LiteralVector,
    clause_out: int,
    params: FeedbackParams,
    rng,
    clause_index: int = 0,
    step: int = 0,
):
    """Sample the Type I table independently for all 2o automata and apply it.

    clause_out must be the training-mode output snapshotted from this target
    and these literals before any update this round.
    """
    thr_r, thr_p = threshold_tables(params)
    if isinstance(target, ClauseTeam):
        _check_width(target.width, literals)
        states = list(target.states)
        for pos in range(2 * target.width):
            idx = team_index(pos, target.width)
            a = ta_action(states[idx])
            lit = int(literals.bits[pos])
            event = _draw_event(
                rng, int(thr_r[a, lit, clause_out]), int(thr_p[a, lit, clause_out]),
                step, clause_index, pos,
            )
            states[idx] = ta_apply(states[idx], event)
        return ClauseTeam(tuple(states), target.polarity)

    _check_width(target.o, literals)
    inc = np.zeros(n_words(2 * target.o), dtype=np.uint64)
    dec = np.zeros_like(inc)
    for pos in range(2 * target.o):
        a = (target.state_value(pos) >> (target.b - 1)) & 1
        lit = int(literals.bits[pos])
        event = _draw_event(
            rng, int(thr_r[a, lit, clause_out]), int(thr_p[a, lit, clause_out]),
            step, clause_index, pos,
        )
        if event == Event.INACTION:
            continue
        deepen = (event == Event.REWARD) == bool(a)  # toward the action's deep end
        word, lane = pos // 64, np.uint64(1) << np.uint64(pos % 64)
        if deepen:
            inc[word] |= lane
        else:
            dec[word] |= lane
    return block_decrement(block_increment(target, inc), dec)


def apply_type_ii(
    target: ClauseTeam | PlaneBlock,
    literals: LiteralVector,
    clause_out: int,
    rng=None,
):
    """Apply the Type II table: deterministic given clause_out (rng unused)."""
    if clause_out == 0:
        return target
    if isinstance(target, ClauseTeam):
        _check_width(target.width, literals)
        states = list(target.states)
        for pos in range(2 * target.width):
            idx = team_index(pos, target.width)
            if (
                ta_action(states[idx]) == Action.EXCLUDE
                and not literals.bits[pos]
            ):
                states[idx] = ta_apply(states[idx], Event.PENALTY)
        return ClauseTeam(tuple(states), target.polarity)

    _check_width(target.o, literals)
    # the penalized excluded automata move toward Include
    inc = ~target.action_plane & ~literals.words & valid_words(2 * target.o)
    return block_increment(target, inc)
