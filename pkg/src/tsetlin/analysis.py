"""Analytic oracle for the feedback design: expected include/exclude payoffs.

The environment abstracts what a single automaton experiences: the input
falls into one of a few disjoint regions (does the rest of the clause match?
is this automaton's literal true? is the input inside the target region?),
the label is noisy, and feedback follows the Type I / Type II tables with
reward scored +1, penalty -1, inaction 0. The closed-form expressions below
give the expected per-round payoff; the Monte-Carlo estimator simulates the
same process through the actual probability tables so discrepancies in
either implementation surface as a sign or magnitude mismatch.

In the balanced regime (the target region carries probability mass 1/2, the
clause matches all of it, and the literal is true on mass theta) the payoff
reduces to a function of (theta, delta, s) whose exclude-side sign flips at
theta = 1/(2s) when labels are noise-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .automaton import Action
from .errors import ConfigError
from .feedback import FeedbackParams, type_i_probs, type_ii_probs


class NashVerdict(Enum):
    INCLUDE_EQUILIBRIUM = "include"
    EXCLUDE_EQUILIBRIUM = "exclude"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class PayoffRegion:
    """One disjoint slice of the input space, seen from one automaton.

    `clause` is the truth value of the rest of the clause (the automaton's
    own literal excluded); when the automaton plays Include, the effective
    clause output becomes clause AND literal. `in_target` marks membership in
    the region where the ideal formula outputs 1; `p_y1` is the label
    probability within the slice.
    """

    mass: float
    literal: int
    clause: int
    in_target: bool
    p_y1: float

    def __post_init__(self):
        if not 0.0 <= self.mass <= 1.0 or not 0.0 <= self.p_y1 <= 1.0:
            raise ConfigError("region probabilities must lie in [0, 1]")
        if self.clause and not self.in_target:
            raise ConfigError(
                "a solution clause never matches outside the target region"
            )


@dataclass(frozen=True)
class PayoffEnvironment:
    s: float
    regions: tuple[PayoffRegion, ...]

    def __post_init__(self):
        if not self.s > 1.0:
            raise ConfigError(f"s must be > 1, got {self.s}")
        total = sum(r.mass for r in self.regions)
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"region masses sum to {total}, not 1")

    @classmethod
    def balanced(cls, theta: float, delta: float, s: float) -> "PayoffEnvironment":
        """The simplified regime: target mass 1/2 entirely matched by the
        clause, literal true on mass theta of it, label noise delta."""
        if not 0.0 <= theta <= 0.5:
            raise ConfigError(f"theta must lie in [0, 0.5], got {theta}")
        if not 0.0 <= delta < 0.5:
            raise ConfigError(f"delta must lie in [0, 0.5), got {delta}")
        return cls(
            s,
            (
                PayoffRegion(theta, 1, 1, True, 1.0 - delta),
                PayoffRegion(0.5 - theta, 0, 1, True, 1.0 - delta),
                PayoffRegion(0.5, 0, 0, False, delta),
            ),
        )

    # Aggregate masses used by the closed-form payoff expressions.

    def _mass(self, pred) -> float:
        return sum(r.mass for r in self.regions if pred(r))

    def _y1_mass(self, pred) -> float:
        return sum(r.mass * r.p_y1 for r in self.regions if pred(r))

    @property
    def p_match_lit(self) -> float:
        """P(clause matches and literal true), the theta set."""
        return self._mass(lambda r: r.clause and r.literal)

    @property
    def p_y1_match_lit(self) -> float:
        return self._y1_mass(lambda r: r.clause and r.literal)

    @property
    def p_y1_target_rest(self) -> float:
        """y=1 mass on the target region outside the matched-and-true set."""
        return self._y1_mass(lambda r: r.in_target and not (r.clause and r.literal))

    @property
    def p_y1_outside(self) -> float:
        return self._y1_mass(lambda r: not r.in_target)

    @property
    def p_y0_match_nolit(self) -> float:
        """y=0 mass where the clause matches but the literal is false."""
        return sum(
            r.mass * (1.0 - r.p_y1)
            for r in self.regions
            if r.clause and not r.literal
        )


def payoff_exclude_full(env: PayoffEnvironment) -> float:
    """Expected Exclude payoff: fractional reward 1/s whenever y=1 outside the
    matched-and-true set, fractional penalty (s-1)/s inside it, and a unit
    penalty when a false-positive clause survives on this automaton's false
    literal."""
    s = env.s
    return (
        env.p_y1_target_rest * (1.0 / s)
        + env.p_y1_outside * (1.0 / s)
        - env.p_y1_match_lit * ((s - 1.0) / s)
        - env.p_y0_match_nolit
    )


def payoff_include_full(env: PayoffEnvironment) -> float:
    """Expected Include payoff: the exact negation of the Exclude payoff minus
    its unit-penalty term (the symmetry is by design)."""
    s = env.s
    return (
        env.p_y1_match_lit * ((s - 1.0) / s)
        - env.p_y1_target_rest * (1.0 / s)
        - env.p_y1_outside * (1.0 / s)
    )


def payoff_exclude_balanced(theta: float, delta: float, s: float) -> float:
    return (
        (1.0 - delta) * (0.5 - theta) * (1.0 / s)
        + delta * (1.0 / (2.0 * s))
        - (1.0 - delta) * theta * ((s - 1.0) / s)
        - delta * (0.5 - theta)
    )


def payoff_include_balanced(theta: float, delta: float, s: float) -> float:
    return (
        (1.0 - delta) * theta * ((s - 1.0) / s)
        - (1.0 - delta) * (0.5 - theta) * (1.0 / s)
        - delta * (1.0 / (2.0 * s))
    )


def nash_check(theta: float, delta: float, s: float) -> NashVerdict:
    """Noise-free equilibrium classification: Include is preferred above
    theta = 1/(2s), Exclude below, boundary at equality.

    delta is accepted for signature completeness; with noisy labels the
    exclude payoff crosses zero below 1/(2s) (see critical_s), which the
    payoff report exposes separately.
    """
    boundary = 1.0 / (2.0 * s)
    if theta > boundary:
        return NashVerdict.INCLUDE_EQUILIBRIUM
    if theta < boundary:
        return NashVerdict.EXCLUDE_EQUILIBRIUM
    return NashVerdict.BOUNDARY


def critical_s(theta: float, delta: float) -> float:
    """The s value at which the balanced Exclude payoff crosses zero; the
    payoff is positive for s below it. Reduces to 1/(2 theta) when delta=0."""
    denom = 2.0 * ((1.0 - delta) * theta + delta * (0.5 - theta))
    return float("inf") if denom <= 0.0 else 1.0 / denom


def monte_carlo_payoff(
    env: PayoffEnvironment,
    action: Action,
    trials: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Simulate (region, label, feedback-event) rounds through the Type I/II
    tables; returns (mean payoff, standard error)."""
    if trials < 1:
        raise ConfigError("trials must be positive")
    params = FeedbackParams(env.s)
    masses = np.array([r.mass for r in env.regions])
    region_idx = rng.choice(len(env.regions), size=trials, p=masses / masses.sum())
    p_y1 = np.array([r.p_y1 for r in env.regions])[region_idx]
    y1 = rng.random(trials) < p_y1

    lits = np.array([r.literal for r in env.regions])[region_idx]
    clause = np.array([r.clause for r in env.regions])[region_idx]
    if action == Action.INCLUDE:
        clause = clause & lits  # an included false literal forces the clause to 0

    p_reward = np.zeros(trials)
    p_penalty = np.zeros(trials)
    for lit in (0, 1):
        for cl in (0, 1):
            cell_i = type_i_probs(action, lit, cl, params)
            cell_ii = type_ii_probs(action, lit, cl)
            in_cell = (lits == lit) & (clause == cl)
            p_reward[in_cell & y1] = cell_i.p_reward
            p_penalty[in_cell & y1] = cell_i.p_penalty
            p_reward[in_cell & ~y1] = cell_ii.p_reward
            p_penalty[in_cell & ~y1] = cell_ii.p_penalty

    u = rng.random(trials)
    payoff = np.where(u < p_reward, 1.0, np.where(u < p_reward + p_penalty, -1.0, 0.0))
    mean = float(payoff.mean())
    stderr = float(payoff.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr
