"""Counter-based randomness shared by the scalar and packed engines.

Every stochastic decision during training is a pure function of
(seed, stream, presentation counter, sub-index), so the two engines can
consume identical randomness without sharing any sequential stream state.
Draws are 63-bit uniforms compared against integer thresholds; a probability
p maps to the threshold floor(p * 2**63), so p=0 never fires and p=1 always
fires. The same mixing function exists twice: a pure-Python version used by
the scalar reference engine and a numba twin inlined into the packed kernels
(see _kernels.py); test_rng pins them bit-identical.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_SEED_TWEAK = 0x6A09E667F3BCC909

U63_SCALE = 1 << 63

# Stream ids (fixed; part of the reproducibility contract)
STREAM_INIT = 0
STREAM_ACTIVATE = 2
STREAM_REWARD = 3
STREAM_PENALTY = 4
STREAM_NEGCLASS = 5


def mix64(z: int) -> int:
    """SplitMix64 finalizer over 64-bit integers."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def hash_u64(seed: int, stream: int, t: int, sub: int) -> int:
    """Random-access 64-bit hash of a (seed, stream, counter, sub) tuple."""
    h = mix64((seed ^ _SEED_TWEAK) & _MASK64)
    h = mix64((h + _GOLDEN * (stream + 1)) & _MASK64)
    h = mix64((h + _GOLDEN * (t + 1)) & _MASK64)
    h = mix64((h + _GOLDEN * (sub + 1)) & _MASK64)
    return h


def hash_u63(seed: int, stream: int, t: int, sub: int) -> int:
    return hash_u64(seed, stream, t, sub) >> 1


def threshold_u63(p: float) -> int:
    """Integer threshold such that P(u63 < threshold) equals p exactly at 0 and 1."""
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return U63_SCALE
    return int(p * U63_SCALE)


def clause_sub(clause: int, position: int) -> int:
    """Sub-index packing one (clause, automaton position) pair; position < 2**24."""
    return (clause << 24) | position


class CounterRng:
    """Engine-facing draw interface over the counter-based hash.

    Tests substitute stubs with the same ``u63`` signature to force or
    suppress stochastic events.
    """

    def __init__(self, seed: int):
        self.seed = seed & _MASK64

    def u63(self, stream: int, t: int, sub: int) -> int:
        return hash_u63(self.seed, stream, t, sub)

    def u64(self, stream: int, t: int, sub: int) -> int:
        return hash_u64(self.seed, stream, t, sub)
