"""Clause representation and evaluation, scalar and bit-plane packed.

Two layouts coexist:

* the scalar ``ClauseTeam`` keeps automata interleaved per variable
  (x1, ~x1, x2, ~x2, ...), mirroring how the team is described per input;
* the packed ``PlaneBlock`` and ``LiteralVector`` use the planar layout
  (all positive literals first, then all negations), so the literal word of
  an input is just the input bits concatenated with their inversion.

``pack_team``/``unpack_block`` perform the permutation between the two.
Plane p holds bit p of every automaton's state value; plane b-1 is the
action plane (Include = most significant bit). Words are 64-bit; trailing
bits past 2o in the last word are kept zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .automaton import Action, TAState, ta_action
from .errors import ConfigError, WidthMismatchError

WORD_BITS = 64


class EvalMode(Enum):
    TRAINING = "training"
    INFERENCE = "inference"


def n_words(bits: int) -> int:
    return (bits + WORD_BITS - 1) // WORD_BITS


def valid_words(bits: int) -> np.ndarray:
    """All-ones words with any trailing bits past `bits` cleared."""
    w = np.full(n_words(bits), ~np.uint64(0), dtype=np.uint64)
    tail = bits % WORD_BITS
    if tail:
        w[-1] = np.uint64((1 << tail) - 1)
    return w


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 vector into uint64 words, bit q at word q//64, lane q%64."""
    bits = np.asarray(bits, dtype=np.uint64)
    words = np.zeros(n_words(len(bits)), dtype=np.uint64)
    for q, bit in enumerate(bits):
        if bit:
            words[q // WORD_BITS] |= np.uint64(1) << np.uint64(q % WORD_BITS)
    return words


def unpack_bits(words: np.ndarray, bits: int) -> np.ndarray:
    out = np.zeros(bits, dtype=np.uint8)
    for q in range(bits):
        out[q] = (int(words[q // WORD_BITS]) >> (q % WORD_BITS)) & 1
    return out


# --- scalar side -----------------------------------------------------------


@dataclass(frozen=True)
class ClauseTeam:
    """2o automata governing one conjunctive clause, plus a fixed polarity."""

    states: tuple[TAState, ...]
    polarity: int = 1

    def __post_init__(self):
        if len(self.states) % 2 != 0 or not self.states:
            raise ConfigError("a clause team holds exactly 2 automata per variable")
        if self.polarity not in (-1, 1):
            raise ConfigError(f"polarity must be +1 or -1, got {self.polarity}")
        n = self.states[0].half_range
        if any(s.half_range != n for s in self.states):
            raise ConfigError("all automata in a team share one half_range")

    @property
    def width(self) -> int:
        return len(self.states) // 2

    def state_for_position(self, position: int) -> TAState:
        """Automaton at a planar literal position (positives then negations)."""
        return self.states[team_index(position, self.width)]


def team_index(position: int, o: int) -> int:
    """Planar literal position -> interleaved team index."""
    return 2 * position if position < o else 2 * (position - o) + 1


@dataclass(frozen=True)
class LiteralVector:
    """2o literal truth values: input bits followed by their negations."""

    bits: np.ndarray

    @classmethod
    def from_input(cls, x: np.ndarray) -> "LiteralVector":
        x = np.asarray(x, dtype=np.uint8)
        return cls(np.concatenate([x, 1 - x]))

    def __post_init__(self):
        o = len(self.bits) // 2
        if len(self.bits) != 2 * o or o == 0:
            raise ConfigError("literal vector length must be 2o")
        if not np.array_equal(self.bits[o:], 1 - self.bits[:o]):
            raise ConfigError("second half must be the bitwise NOT of the first")

    @property
    def width(self) -> int:
        return len(self.bits) // 2

    @property
    def words(self) -> np.ndarray:
        return pack_bits(self.bits)


def clause_evaluate(team: ClauseTeam, literals: LiteralVector, mode: EvalMode) -> int:
    """Conjunction of the included literals.

    A clause with nothing included is identically 1 while training but reads
    as 0 at inference time, so predictions agree before and after pruning.
    """
    if team.width != literals.width:
        raise WidthMismatchError(
            f"team width {team.width} != literal width {literals.width}"
        )
    any_included = False
    for p in range(2 * team.width):
        if ta_action(team.state_for_position(p)) == Action.INCLUDE:
            any_included = True
            if not literals.bits[p]:
                return 0
    if not any_included:
        return 1 if mode == EvalMode.TRAINING else 0
    return 1


# --- packed side -----------------------------------------------------------


@dataclass(frozen=True)
class PlaneBlock:
    """Bit-plane transposed automaton states of one clause team.

    planes has shape (b, n_words(2o)); plane b-1 is the action plane.
    """

    planes: np.ndarray
    o: int

    def __post_init__(self):
        if self.planes.ndim != 2 or self.planes.dtype != np.uint64:
            raise ConfigError("planes must be a 2-D uint64 array")
        if self.planes.shape[1] != n_words(2 * self.o):
            raise ConfigError("plane width does not match 2o bits")
        self.planes.setflags(write=False)

    @property
    def b(self) -> int:
        return self.planes.shape[0]

    @property
    def action_plane(self) -> np.ndarray:
        return self.planes[-1]

    def state_value(self, position: int) -> int:
        w, lane = position // WORD_BITS, position % WORD_BITS
        return sum(
            ((int(self.planes[p, w]) >> lane) & 1) << p for p in range(self.b)
        )


def _bits_for_half_range(n: int) -> int:
    b = (2 * n).bit_length() - 1
    if (1 << b) != 2 * n:
        raise ConfigError(f"2N must be a power of two for packing, got 2N={2 * n}")
    return b


def pack_team(team: ClauseTeam) -> PlaneBlock:
    o = team.width
    b = _bits_for_half_range(team.states[0].half_range)
    planes = np.zeros((b, n_words(2 * o)), dtype=np.uint64)
    for pos in range(2 * o):
        v = team.state_for_position(pos).value
        w, lane = pos // WORD_BITS, pos % WORD_BITS
        for p in range(b):
            if (v >> p) & 1:
                planes[p, w] |= np.uint64(1) << np.uint64(lane)
    return PlaneBlock(planes, o)


def unpack_block(block: PlaneBlock, polarity: int = 1) -> ClauseTeam:
    half = 1 << (block.b - 1)
    states = [TAState(0, half)] * (2 * block.o)
    for pos in range(2 * block.o):
        states[team_index(pos, block.o)] = TAState(block.state_value(pos), half)
    return ClauseTeam(tuple(states), polarity)


def _as_mask_words(mask, o: int) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.dtype == np.uint64 and mask.shape == (n_words(2 * o),):
        return mask
    if len(mask) != 2 * o:
        raise WidthMismatchError(f"mask has {len(mask)} bits, expected {2 * o}")
    return pack_bits(mask)


def block_increment(block: PlaneBlock, mask) -> PlaneBlock:
    """Saturating +1 on every masked automaton, ripple-carry across planes."""
    planes = block.planes.copy()
    carry = _as_mask_words(mask, block.o).copy()
    for p in range(block.b):
        planes[p], carry = planes[p] ^ carry, planes[p] & carry
    for p in range(block.b):  # overflowed lanes clamp to all-ones
        planes[p] |= carry
    return PlaneBlock(planes, block.o)


def block_decrement(block: PlaneBlock, mask) -> PlaneBlock:
    """Saturating -1 on every masked automaton."""
    planes = block.planes.copy()
    borrow = _as_mask_words(mask, block.o).copy()
    for p in range(block.b):
        planes[p], borrow = planes[p] ^ borrow, ~planes[p] & borrow
    for p in range(block.b):  # underflowed lanes clamp to zero
        planes[p] &= ~borrow
    return PlaneBlock(planes, block.o)


def clause_evaluate_packed(
    block: PlaneBlock, literals: LiteralVector, mode: EvalMode
) -> int:
    if block.o != literals.width:
        raise WidthMismatchError(
            f"block width {block.o} != literal width {literals.width}"
        )
    include = block.action_plane
    violated = include & ~literals.words & valid_words(2 * block.o)
    if int(np.bitwise_or.reduce(violated)):
        return 0
    if not int(np.bitwise_or.reduce(include)):
        return 1 if mode == EvalMode.TRAINING else 0
    return 1
