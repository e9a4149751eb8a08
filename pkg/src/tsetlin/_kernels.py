"""Numba kernels backing the packed engine.

All state lives in uint64 bit-plane arrays of shape (m, b, W); plane b-1 is
the action plane. The hash functions are bit-exact twins of the pure-Python
ones in _rng.py, so the packed trainer reproduces the scalar reference
decision for decision. Every arithmetic operand stays uint64 (numba promotes
mixed uint64/int64 to float64, which would silently break the twin).
"""

from __future__ import annotations

import numpy as np
from numba import njit

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SEED_TWEAK = np.uint64(0x6A09E667F3BCC909)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_U63_SCALE = 2.0**63

STREAM_INIT = np.uint64(0)
STREAM_ACTIVATE = np.uint64(2)
STREAM_REWARD = np.uint64(3)
STREAM_PENALTY = np.uint64(4)
STREAM_NEGCLASS = np.uint64(5)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _prefix(seed, stream, t):
    """Hash chain absorbed through (seed, stream, t); finish with _final(sub)."""
    h = _mix64(seed ^ _SEED_TWEAK)
    h = _mix64(h + _GOLDEN * (stream + _ONE))
    return _mix64(h + _GOLDEN * (t + _ONE))


@njit(cache=True, inline="always")
def _final_u63(pre, sub):
    return _mix64(pre + _GOLDEN * (sub + _ONE)) >> _ONE


@njit(cache=True, inline="always")
def _hash_u64(seed, stream, t, sub):
    return _mix64(_prefix(seed, stream, t) + _GOLDEN * (sub + _ONE))


@njit(cache=True, inline="always")
def _hash_u63(seed, stream, t, sub):
    return _hash_u64(seed, stream, t, sub) >> _ONE


@njit(cache=True)
def hash_u64_py(seed, stream, t, sub):
    """Python-callable twin entry point (used by tests and slow paths)."""
    return _hash_u64(np.uint64(seed), np.uint64(stream), np.uint64(t), np.uint64(sub))


@njit(cache=True, inline="always")
def _act_threshold(p):
    # float in [0,1] -> u63 threshold, truncating like _rng.threshold_u63
    return np.uint64(p * _U63_SCALE)


@njit(cache=True)
def init_planes(m, o, b, seed):
    """Boundary initialization: each automaton at N-1 or N by a fair hash coin."""
    n_w = (2 * o + 63) // 64
    planes = np.zeros((m, b, n_w), dtype=np.uint64)
    s = np.uint64(seed)
    for j in range(m):
        for pos in range(2 * o):
            coin = _hash_u64(s, STREAM_INIT, np.uint64(j), np.uint64(pos)) & _ONE
            w = pos // 64
            lane = _ONE << np.uint64(pos % 64)
            if coin:
                planes[j, b - 1, w] |= lane  # value N = 100..0
            else:
                for p in range(b - 1):  # value N-1 = 011..1
                    planes[j, p, w] |= lane
    return planes


@njit(cache=True, inline="always")
def _clause_out(planes, j, lit_row, b, n_w, training):
    include_any = _ZERO
    for w in range(n_w):
        a = planes[j, b - 1, w]
        include_any |= a
        if a & ~lit_row[w]:
            return 0
    if include_any == _ZERO:
        return 1 if training else 0
    return 1


@njit(cache=True, inline="always")
def _ripple_inc(planes, j, mask, b, n_w):
    for w in range(n_w):
        carry = mask[w]
        if carry == _ZERO:
            continue
        for p in range(b):
            v = planes[j, p, w]
            planes[j, p, w] = v ^ carry
            carry = v & carry
        if carry:
            for p in range(b):
                planes[j, p, w] |= carry


@njit(cache=True, inline="always")
def _ripple_dec(planes, j, mask, b, n_w):
    for w in range(n_w):
        borrow = mask[w]
        if borrow == _ZERO:
            continue
        for p in range(b):
            v = planes[j, p, w]
            planes[j, p, w] = v ^ borrow
            borrow = ~v & borrow
        if borrow:
            for p in range(b):
                planes[j, p, w] &= ~borrow


_U63_TOP = np.uint64(1) << np.uint64(63)


@njit(cache=True)
def type_i_update(
    planes, j, lit_row, clause_out, thr_r, thr_p, seed, t, o, b, inc, dec
):
    """Sample Table-cell events for all 2o automata of clause j, then apply.

    Draw keys are random-access, so hashes whose comparison outcome is forced
    (threshold 0 or 1) are skipped without disturbing any other decision.
    """
    n_w = planes.shape[2]
    for w in range(n_w):
        inc[w] = _ZERO
        dec[w] = _ZERO
    tj = np.uint64(t)
    pre_r = _prefix(seed, STREAM_REWARD, tj)
    pre_p = _prefix(seed, STREAM_PENALTY, tj)
    for pos in range(2 * o):
        w = pos // 64
        lane_shift = np.uint64(pos % 64)
        a = np.int64((planes[j, b - 1, w] >> lane_shift) & _ONE)
        lit = np.int64((lit_row[w] >> lane_shift) & _ONE)
        sub = np.uint64((j << 24) | pos)
        deepen = False
        fired = False
        tr = thr_r[a, lit, clause_out]
        tp = thr_p[a, lit, clause_out]
        if tr != _ZERO and (tr == _U63_TOP or _final_u63(pre_r, sub) < tr):
            fired = True
            deepen = a == 1  # reward deepens the current action
        elif tp != _ZERO and (tp == _U63_TOP or _final_u63(pre_p, sub) < tp):
            fired = True
            deepen = a == 0  # penalty moves toward the boundary
        if fired:
            if deepen:
                inc[w] |= _ONE << lane_shift
            else:
                dec[w] |= _ONE << lane_shift
    _ripple_inc(planes, j, inc, b, n_w)
    _ripple_dec(planes, j, dec, b, n_w)


@njit(cache=True)
def type_ii_update(planes, j, lit_row, clause_out, valid, b, inc):
    """Penalize every excluded automaton whose literal is 0 (clause must be 1)."""
    if clause_out == 0:
        return
    n_w = planes.shape[2]
    for w in range(n_w):
        inc[w] = ~planes[j, b - 1, w] & ~lit_row[w] & valid[w]
    _ripple_inc(planes, j, inc, b, n_w)


@njit(cache=True)
def train_epoch(
    planes, lit_rows, labels, order, seed, t0, T, thr_r, thr_p, o, valid
):
    """One training pass over `order`; presentation counter starts at t0.

    Clause j (0-based) has positive polarity iff j is even. Clause outputs
    and the vote sum are snapshotted per example before any update.
    """
    m, b, n_w = planes.shape
    outs = np.empty(m, dtype=np.uint8)
    inc = np.empty(n_w, dtype=np.uint64)
    dec = np.empty(n_w, dtype=np.uint64)
    s = np.uint64(seed)
    two_t = 2.0 * T
    for step in range(order.shape[0]):
        i = order[step]
        t = np.uint64(t0 + step)
        lit_row = lit_rows[i]
        f = 0
        for j in range(m):
            c = _clause_out(planes, j, lit_row, b, n_w, True)
            outs[j] = c
            f += c if j % 2 == 0 else -c
        fc = f
        if fc > T:
            fc = T
        elif fc < -T:
            fc = -T
        if labels[i] == 1:
            thr_act = _act_threshold((T - fc) / two_t)
        else:
            thr_act = _act_threshold((T + fc) / two_t)
        pre_a = _prefix(s, STREAM_ACTIVATE, t)
        for j in range(m):
            if _final_u63(pre_a, np.uint64(j)) >= thr_act:
                continue
            positive = j % 2 == 0
            wants_type_i = positive == (labels[i] == 1)
            if wants_type_i:
                type_i_update(
                    planes, j, lit_row, np.int64(outs[j]), thr_r, thr_p, s, t,
                    o, b, inc, dec,
                )
            else:
                type_ii_update(planes, j, lit_row, np.int64(outs[j]), valid, b, inc)


@njit(cache=True)
def vote_sums(planes, lit_rows, training):
    """Signed clause-vote sums for a batch of literal rows."""
    n = lit_rows.shape[0]
    m, b, n_w = planes.shape
    sums = np.zeros(n, dtype=np.int64)
    for i in range(n):
        f = 0
        for j in range(m):
            c = _clause_out(planes, j, lit_rows[i], b, n_w, training)
            f += c if j % 2 == 0 else -c
        sums[i] = f
    return sums


@njit(cache=True, inline="always")
def _negative_class(seed, t, y, n_classes):
    h = _hash_u64(seed, STREAM_NEGCLASS, np.uint64(t), _ZERO)
    q = np.int64(h % np.uint64(n_classes - 1))
    if q >= y:
        q += np.int64(1)
    return q


@njit(cache=True)
def negative_class_py(seed, t, y, n_classes):
    return _negative_class(np.uint64(seed), t, y, n_classes)


@njit(cache=True)
def train_epoch_mc(
    planes_all, bank_seeds, mc_seed, lit_rows, labels, order, t0, T,
    thr_r, thr_p, o, valid,
):
    """Multi-class pass: the target bank trains toward 1, one random other
    bank toward 0; remaining banks are untouched."""
    n_classes, m, b, n_w = planes_all.shape
    one = np.ones(1, dtype=np.uint8)
    zero = np.zeros(1, dtype=np.uint8)
    step_order = np.zeros(1, dtype=np.int64)
    ms = np.uint64(mc_seed)
    for step in range(order.shape[0]):
        i = order[step]
        t = t0 + step
        y = np.int64(labels[i])
        q = _negative_class(ms, t, y, n_classes)
        row = lit_rows[i : i + 1]
        train_epoch(
            planes_all[y], row, one, step_order, bank_seeds[y], t, T,
            thr_r, thr_p, o, valid,
        )
        train_epoch(
            planes_all[q], row, zero, step_order, bank_seeds[q], t, T,
            thr_r, thr_p, o, valid,
        )


@njit(cache=True)
def vote_sums_mc(planes_all, lit_rows):
    n_classes = planes_all.shape[0]
    n = lit_rows.shape[0]
    sums = np.zeros((n, n_classes), dtype=np.int64)
    for c in range(n_classes):
        sums[:, c] = vote_sums(planes_all[c], lit_rows, False)
    return sums


@njit(cache=True)
def pack_literal_rows(x):
    """(n, o) 0/1 matrix -> (n, W) uint64 literal words (input ++ negation)."""
    n, o = x.shape
    n_w = (2 * o + 63) // 64
    rows = np.zeros((n, n_w), dtype=np.uint64)
    for i in range(n):
        for k in range(o):
            if x[i, k]:
                rows[i, k // 64] |= _ONE << np.uint64(k % 64)
            else:
                pos = o + k
                rows[i, pos // 64] |= _ONE << np.uint64(pos % 64)
    return rows
