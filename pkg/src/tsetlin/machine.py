"""The extended Tsetlin Machine for one binary output.

A machine is a bank of m clause teams with alternating polarity (clause j,
0-based, votes positively iff j is even). Training follows the clipped-sum
activation scheme: with target 1 a clause receives Type I feedback with
probability (T - clamp(f, -T, T)) / 2T, with target 0 Type II with
probability (T + clamp(f, -T, T)) / 2T, and negative-polarity clauses swap
the two roles. Clause outputs and the vote sum are snapshotted per example
before any state changes.

Two engines share one decision stream: the packed engine (bit-plane uint64
state, numba kernels) is the production path; the scalar engine is the
pure-Python reference the packed path is tested bit-exact against.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable

import numpy as np

from . import _kernels, _rng
from .automaton import boundary_state
from .clauses import (
    ClauseTeam,
    EvalMode,
    LiteralVector,
    clause_evaluate,
    team_index,
    valid_words,
)
from .datasets import BinaryDataset
from .errors import ConfigError, TsetlinError, WidthMismatchError
from .feedback import FeedbackParams, apply_type_i, apply_type_ii, threshold_tables

MODEL_MAGIC = "tsetlin-model"
MODEL_VERSION = 1

_MASK64 = (1 << 64) - 1


def _seed_u64(seed: int) -> np.uint64:
    return np.uint64(seed & _MASK64)


class FeedbackType(Enum):
    TYPE_I = "type_i"
    TYPE_II = "type_ii"


@dataclass(frozen=True)
class MachineConfig:
    """Hyperparameters: input width o, clause count m, threshold T, precision s,
    state bits b (2N = 2**b states per automaton), boost flag, epoch budget."""

    o: int
    clauses: int
    T: int
    s: float
    state_bits: int = 7
    boost: bool = False
    epochs: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.o < 1:
            raise ConfigError(f"input width must be >= 1, got {self.o}")
        if self.clauses < 2 or self.clauses % 2 != 0:
            raise ConfigError(
                f"clause count must be a positive even number, got {self.clauses}"
            )
        if self.T < 1:
            raise ConfigError(f"threshold T must be >= 1, got {self.T}")
        if not self.s > 1.0:
            raise ConfigError(f"s must be > 1, got {self.s}")
        if self.state_bits < 1:
            raise ConfigError(f"state_bits must be >= 1, got {self.state_bits}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")

    @property
    def half_range(self) -> int:
        return 1 << (self.state_bits - 1)

    @property
    def feedback(self) -> FeedbackParams:
        return FeedbackParams(self.s, self.boost)


@dataclass(frozen=True)
class ClauseExpression:
    """Exported clause: polarity and the included variable index sets (0-based)."""

    polarity: int
    included_positive: frozenset[int]
    included_negated: frozenset[int]

    @property
    def contradictory(self) -> bool:
        return bool(self.included_positive & self.included_negated)

    def to_dnf(self) -> str:
        parts = []
        for k in sorted(self.included_positive | self.included_negated):
            if k in self.included_positive:
                parts.append(f"x{k + 1}")
            if k in self.included_negated:
                parts.append(f"~x{k + 1}")
        sign = "+" if self.polarity > 0 else "-"
        return f"{sign} " + " & ".join(parts)

    def to_mask(self, o: int) -> str:
        """Per-variable mask: 1 = x_k included, 0 = ~x_k included, * = neither,
        ! = both (contradiction)."""
        chars = []
        for k in range(o):
            pos, neg = k in self.included_positive, k in self.included_negated
            chars.append("!" if pos and neg else "1" if pos else "0" if neg else "*")
        return " ".join(chars)

    def evaluate(self, x: np.ndarray) -> int:
        for k in self.included_positive:
            if not x[k]:
                return 0
        for k in self.included_negated:
            if x[k]:
                return 0
        return 1


@dataclass
class EpochStats:
    epoch: int
    train_accuracy: float
    test_accuracy: float | None = None


@dataclass
class TrainReport:
    """Per-epoch accuracies (inference-mode clause rule, matching post-prune
    behavior)."""

    epochs: list[EpochStats]

    @property
    def final_train_accuracy(self) -> float | None:
        return self.epochs[-1].train_accuracy if self.epochs else None

    @property
    def final_test_accuracy(self) -> float | None:
        return self.epochs[-1].test_accuracy if self.epochs else None

    def to_csv_text(self) -> str:
        lines = ["epoch,train_accuracy,test_accuracy"]
        for e in self.epochs:
            test = "" if e.test_accuracy is None else f"{e.test_accuracy:.6f}"
            lines.append(f"{e.epoch},{e.train_accuracy:.6f},{test}")
        return "\n".join(lines) + "\n"

    def text(self) -> str:
        lines = []
        for e in self.epochs:
            row = f"epoch {e.epoch:4d}  train_acc {e.train_accuracy:.4f}"
            if e.test_accuracy is not None:
                row += f"  test_acc {e.test_accuracy:.4f}"
            lines.append(row)
        return "\n".join(lines)


def activation_probability(f: int, T: int, target: FeedbackType) -> float:
    """Feedback-activation probability at clipped vote sum f."""
    fc = max(-T, min(T, f))
    if target == FeedbackType.TYPE_I:
        return (T - fc) / (2 * T)
    return (T + fc) / (2 * T)


def epoch_order(seed: int, epoch: int, n: int) -> np.ndarray:
    """Seeded uniform shuffle of one epoch; shared by both engines."""
    return np.random.default_rng((seed & ((1 << 64) - 1), 1, epoch)).permutation(n)


def _check_dataset(o: int, dataset: BinaryDataset):
    if dataset.count == 0:
        raise ConfigError("dataset is empty")
    if dataset.o != o:
        raise WidthMismatchError(
            f"machine width {o} != dataset width {dataset.o}"
        )


class TsetlinMachine:
    """Packed-engine machine: state is a (m, state_bits, words) uint64 array."""

    def __init__(self, config: MachineConfig, planes: np.ndarray | None = None):
        self.config = config
        if planes is None:
            planes = _kernels.init_planes(
                config.clauses, config.o, config.state_bits, _seed_u64(config.seed)
            )
        self.planes = planes
        self._valid = valid_words(2 * config.o)
        self._thr_r, self._thr_p = threshold_tables(config.feedback)

    # -- inference ---------------------------------------------------------

    def _literal_rows(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(np.asarray(X, dtype=np.uint8))
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.config.o:
            raise WidthMismatchError(
                f"machine width {self.config.o} != input width {X.shape[1]}"
            )
        return _kernels.pack_literal_rows(X)

    def vote_sums(self, X: np.ndarray, mode: EvalMode = EvalMode.INFERENCE):
        rows = self._literal_rows(X)
        return _kernels.vote_sums(self.planes, rows, mode == EvalMode.TRAINING)

    def clause_sum(self, x: np.ndarray, mode: EvalMode = EvalMode.INFERENCE) -> int:
        return int(self.vote_sums(np.asarray(x)[None, :], mode)[0])

    def predict(self, x: np.ndarray) -> int:
        return 1 if self.clause_sum(x) >= 0 else 0

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        return (self.vote_sums(X) >= 0).astype(np.int64)

    def evaluate(self, dataset: BinaryDataset) -> float:
        _check_dataset(self.config.o, dataset)
        return float(np.mean(self.predict_batch(dataset.X) == dataset.y))

    # -- training ----------------------------------------------------------

    def train_example(self, x: np.ndarray, y: int, step: int = 0):
        rows = self._literal_rows(np.asarray(x))
        _kernels.train_epoch(
            self.planes, rows, np.array([y], dtype=np.uint8),
            np.zeros(1, dtype=np.int64), _seed_u64(self.config.seed), step,
            self.config.T, self._thr_r, self._thr_p, self.config.o, self._valid,
        )

    def fit(
        self,
        train: BinaryDataset,
        test: BinaryDataset | None = None,
        progress: Callable[[EpochStats], None] | None = None,
    ) -> TrainReport:
        cfg = self.config
        _check_dataset(cfg.o, train)
        if train.n_classes != 2:
            raise ConfigError(
                f"binary machine trains on 2-class data, got {train.n_classes} classes"
            )
        if test is not None:
            _check_dataset(cfg.o, test)
        rows = _kernels.pack_literal_rows(np.ascontiguousarray(train.X))
        labels = train.y.astype(np.uint8)
        stats: list[EpochStats] = []
        for epoch in range(cfg.epochs):
            order = epoch_order(cfg.seed, epoch, train.count)
            _kernels.train_epoch(
                self.planes, rows, labels, order, _seed_u64(cfg.seed),
                epoch * train.count, cfg.T, self._thr_r, self._thr_p,
                cfg.o, self._valid,
            )
            entry = EpochStats(
                epoch,
                float(np.mean((_kernels.vote_sums(self.planes, rows, False) >= 0)
                              == (train.y == 1))),
                self.evaluate(test) if test is not None else None,
            )
            stats.append(entry)
            if progress is not None:
                progress(entry)
        return TrainReport(stats)

    # -- introspection / persistence ----------------------------------------

    def polarity(self, j: int) -> int:
        return 1 if j % 2 == 0 else -1

    def states(self) -> np.ndarray:
        """(m, 2o) state values in planar literal order."""
        o, b = self.config.o, self.config.state_bits
        positions = np.arange(2 * o)
        words = self.planes[:, :, positions // 64]
        lanes = (positions % 64).astype(np.uint64)
        bits = ((words >> lanes) & np.uint64(1)).astype(np.int64)
        return (bits << np.arange(b, dtype=np.int64)[None, :, None]).sum(axis=1)

    def prune(self) -> list[ClauseExpression]:
        """Export every clause with a nonempty include set; states untouched."""
        o = self.config.o
        included = self.states() >= self.config.half_range
        exprs = []
        for j in range(self.config.clauses):
            pos = frozenset(np.flatnonzero(included[j, :o]).tolist())
            neg = frozenset(np.flatnonzero(included[j, o:]).tolist())
            if pos or neg:
                exprs.append(ClauseExpression(self.polarity(j), pos, neg))
        return exprs

    @classmethod
    def from_states(cls, config: MachineConfig, values: np.ndarray) -> "TsetlinMachine":
        """Build a machine from explicit (m, 2o) planar state values."""
        m, b, o = config.clauses, config.state_bits, config.o
        if values.shape != (m, 2 * o):
            raise ConfigError(f"expected states of shape {(m, 2 * o)}")
        if values.min() < 0 or values.max() >= (1 << b):
            raise ConfigError("state value outside [0, 2N-1]")
        lanes = (np.arange(2 * o) % 64).astype(np.uint64)
        word_starts = np.arange(0, 2 * o, 64)
        planes = np.zeros((m, b, (2 * o + 63) // 64), dtype=np.uint64)
        for p in range(b):
            bits = ((values.astype(np.uint64) >> np.uint64(p)) & np.uint64(1)) << lanes
            planes[:, p, :] = np.bitwise_or.reduceat(bits, word_starts, axis=1)
        return cls(config, planes)

    @classmethod
    def from_included_literals(
        cls,
        config: MachineConfig,
        included: Iterable[tuple[Iterable[int], Iterable[int]]],
    ) -> "TsetlinMachine":
        """Fixture builder: per clause, (positive, negated) 0-based variable sets
        to include at full depth; everything else excluded at full depth."""
        o, b = config.o, config.state_bits
        values = np.zeros((config.clauses, 2 * o), dtype=np.int64)
        rows = list(included)
        if len(rows) != config.clauses:
            raise ConfigError("one (positive, negated) pair per clause required")
        for j, (pos, neg) in enumerate(rows):
            for k in pos:
                values[j, k] = (1 << b) - 1
            for k in neg:
                values[j, o + k] = (1 << b) - 1
        return cls.from_states(config, values)

    def save(self, path):
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.dumps())

    def dumps(self) -> str:
        cfg = self.config
        lines = [
            f"{MODEL_MAGIC} {MODEL_VERSION}",
            f"o={cfg.o} m={cfg.clauses} T={cfg.T} s={cfg.s!r} "
            f"b={cfg.state_bits} boost={int(cfg.boost)}",
        ]
        for row in self.states():
            lines.append(" ".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, path) -> "TsetlinMachine":
        with open(path, "r", encoding="ascii") as fh:
            return cls.loads(fh.read())

    @classmethod
    def loads(cls, text: str) -> "TsetlinMachine":
        lines = text.splitlines()
        machine, consumed = cls._parse_block(lines, 0)
        if consumed != len([ln for ln in lines if ln.strip()]):
            raise TsetlinError("trailing content after model payload")
        return machine

    @classmethod
    def _parse_block(cls, lines: list[str], start: int) -> tuple["TsetlinMachine", int]:
        if start >= len(lines) or not lines[start].startswith(MODEL_MAGIC):
            raise TsetlinError(f"not a {MODEL_MAGIC} file")
        version = lines[start].split()[1]
        if int(version) != MODEL_VERSION:
            raise TsetlinError(f"unsupported model version {version}")
        fields = dict(item.split("=") for item in lines[start + 1].split())
        cfg = MachineConfig(
            o=int(fields["o"]), clauses=int(fields["m"]), T=int(fields["T"]),
            s=float(fields["s"]), state_bits=int(fields["b"]),
            boost=bool(int(fields["boost"])), epochs=0, seed=0,
        )
        values = np.zeros((cfg.clauses, 2 * cfg.o), dtype=np.int64)
        for j in range(cfg.clauses):
            row = lines[start + 2 + j].split()
            if len(row) != 2 * cfg.o:
                raise TsetlinError(
                    f"clause {j}: expected {2 * cfg.o} states, got {len(row)}"
                )
            values[j] = [int(v) for v in row]
        return cls.from_states(cfg, values), start + 2 + cfg.clauses


class ScalarTsetlinMachine:
    """Pure-Python reference engine over interleaved ClauseTeam state.

    Consumes the identical decision stream as the packed engine; kept simple
    rather than fast and used as the bit-exactness oracle.
    """

    def __init__(self, config: MachineConfig):
        self.config = config
        n = config.half_range
        teams = []
        for j in range(config.clauses):
            states = [None] * (2 * config.o)
            for pos in range(2 * config.o):
                coin = _rng.hash_u64(config.seed, _rng.STREAM_INIT, j, pos) & 1
                states[team_index(pos, config.o)] = boundary_state(n, bool(coin))
            teams.append(ClauseTeam(tuple(states), 1 if j % 2 == 0 else -1))
        self.teams = teams

    def clause_sum(self, x: np.ndarray, mode: EvalMode = EvalMode.INFERENCE) -> int:
        lits = LiteralVector.from_input(x)
        total = 0
        for j, team in enumerate(self.teams):
            total += team.polarity * clause_evaluate(team, lits, mode)
        return total

    def predict(self, x: np.ndarray) -> int:
        return 1 if self.clause_sum(x) >= 0 else 0

    def train_example(
        self,
        x: np.ndarray,
        y: int,
        step: int = 0,
        rng=None,
        clause_order: Iterable[int] | None = None,
    ):
        cfg = self.config
        if rng is None:
            rng = _rng.CounterRng(cfg.seed)
        lits = LiteralVector.from_input(x)
        outs = [
            clause_evaluate(team, lits, EvalMode.TRAINING) for team in self.teams
        ]
        f = sum(
            out if j % 2 == 0 else -out for j, out in enumerate(outs)
        )
        fc = max(-cfg.T, min(cfg.T, f))
        if y == 1:
            thr = _rng.threshold_u63((cfg.T - fc) / (2 * cfg.T))
        else:
            thr = _rng.threshold_u63((cfg.T + fc) / (2 * cfg.T))
        params = cfg.feedback
        for j in clause_order if clause_order is not None else range(cfg.clauses):
            if rng.u63(_rng.STREAM_ACTIVATE, step, j) >= thr:
                continue
            wants_type_i = (j % 2 == 0) == (y == 1)
            if wants_type_i:
                self.teams[j] = apply_type_i(
                    self.teams[j], lits, outs[j], params, rng,
                    clause_index=j, step=step,
                )
            else:
                self.teams[j] = apply_type_ii(self.teams[j], lits, outs[j])

    def fit(
        self, train: BinaryDataset, test: BinaryDataset | None = None
    ) -> TrainReport:
        cfg = self.config
        _check_dataset(cfg.o, train)
        if train.n_classes != 2:
            raise ConfigError(
                f"binary machine trains on 2-class data, got {train.n_classes} classes"
            )
        stats = []
        for epoch in range(cfg.epochs):
            order = epoch_order(cfg.seed, epoch, train.count)
            for step, i in enumerate(order):
                self.train_example(
                    train.X[i], int(train.y[i]), step=epoch * train.count + step
                )
            train_acc = float(
                np.mean([self.predict(x) for x in train.X] == (train.y == 1))
            )
            test_acc = None
            if test is not None:
                test_acc = float(
                    np.mean([self.predict(x) for x in test.X] == (test.y == 1))
                )
            stats.append(EpochStats(epoch, train_acc, test_acc))
        return TrainReport(stats)

    def states(self) -> np.ndarray:
        """(m, 2o) state values in planar literal order (packed-engine layout)."""
        cfg = self.config
        out = np.zeros((cfg.clauses, 2 * cfg.o), dtype=np.int64)
        for j, team in enumerate(self.teams):
            for pos in range(2 * cfg.o):
                out[j, pos] = team.state_for_position(pos).value
        return out
