"""Multi-class machine: one clause bank per class, argmax decision.

Training presents each example to exactly two banks: the target class bank
as a positive example and one uniformly random other bank as a negative
example. Ties in the argmax break toward the lowest class index.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import _kernels, _rng
from .datasets import BinaryDataset
from .errors import ConfigError, TsetlinError
from .machine import (
    EpochStats,
    MachineConfig,
    TrainReport,
    TsetlinMachine,
    epoch_order,
    _check_dataset,
)

MC_MAGIC = "tsetlin-mc-model"
MC_VERSION = 1


def bank_seed(seed: int, bank: int) -> int:
    """Per-bank seed derived from the machine seed (stream 6 is reserved)."""
    return _rng.hash_u64(seed, 6, bank, 0)


def draw_negative_class(seed: int, t: int, y: int, n_classes: int) -> int:
    """Uniform class != y; one draw per training example."""
    q = _rng.hash_u64(seed, _rng.STREAM_NEGCLASS, t, 0) % (n_classes - 1)
    return q + 1 if q >= y else q


class MultiClassMachine:
    def __init__(
        self,
        config: MachineConfig,
        n_classes: int,
        banks: list[TsetlinMachine] | None = None,
    ):
        if n_classes < 2:
            raise ConfigError(f"need at least 2 classes, got {n_classes}")
        self.config = config
        self.n_classes = n_classes
        if banks is None:
            banks = [
                TsetlinMachine(
                    MachineConfig(
                        o=config.o, clauses=config.clauses, T=config.T, s=config.s,
                        state_bits=config.state_bits, boost=config.boost,
                        epochs=config.epochs, seed=bank_seed(config.seed, c),
                    )
                )
                for c in range(n_classes)
            ]
        self.banks = banks

    def _planes_all(self) -> np.ndarray:
        return np.stack([bank.planes for bank in self.banks])

    def _scatter_planes(self, planes_all: np.ndarray):
        for c, bank in enumerate(self.banks):
            bank.planes = planes_all[c]

    def class_sums(self, x: np.ndarray) -> np.ndarray:
        return np.array([bank.clause_sum(x) for bank in self.banks])

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(self.class_sums(x)))

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        rows = self.banks[0]._literal_rows(X)
        sums = _kernels.vote_sums_mc(self._planes_all(), rows)
        return np.argmax(sums, axis=1)

    def evaluate(self, dataset: BinaryDataset) -> float:
        _check_dataset(self.config.o, dataset)
        return float(np.mean(self.predict_batch(dataset.X) == dataset.y))

    def train_example(self, x: np.ndarray, y: int, step: int = 0) -> int:
        """Train bank y toward 1 and a random other bank toward 0; returns the
        negative class chosen."""
        if not 0 <= y < self.n_classes:
            raise ConfigError(f"label {y} outside [0, {self.n_classes})")
        q = draw_negative_class(self.config.seed, step, y, self.n_classes)
        self.banks[y].train_example(x, 1, step=step)
        self.banks[q].train_example(x, 0, step=step)
        return q

    def fit(
        self,
        train: BinaryDataset,
        test: BinaryDataset | None = None,
        progress: Callable[[EpochStats], None] | None = None,
    ) -> TrainReport:
        cfg = self.config
        _check_dataset(cfg.o, train)
        if test is not None:
            _check_dataset(cfg.o, test)
        if train.n_classes > self.n_classes:
            raise ConfigError(
                f"dataset has {train.n_classes} classes, machine has {self.n_classes}"
            )
        planes_all = self._planes_all()
        seeds = np.array(
            [bank.config.seed & ((1 << 64) - 1) for bank in self.banks],
            dtype=np.uint64,
        )
        rows = _kernels.pack_literal_rows(np.ascontiguousarray(train.X))
        labels = train.y.astype(np.uint8)
        valid = self.banks[0]._valid
        thr_r, thr_p = self.banks[0]._thr_r, self.banks[0]._thr_p
        stats: list[EpochStats] = []
        for epoch in range(cfg.epochs):
            order = epoch_order(cfg.seed, epoch, train.count)
            _kernels.train_epoch_mc(
                planes_all, seeds, np.uint64(cfg.seed & ((1 << 64) - 1)), rows, labels, order,
                epoch * train.count, cfg.T, thr_r, thr_p, cfg.o, valid,
            )
            preds = np.argmax(_kernels.vote_sums_mc(planes_all, rows), axis=1)
            self._scatter_planes(planes_all)
            entry = EpochStats(
                epoch,
                float(np.mean(preds == train.y)),
                self.evaluate(test) if test is not None else None,
            )
            stats.append(entry)
            if progress is not None:
                progress(entry)
        self._scatter_planes(planes_all)
        return TrainReport(stats)

    def save(self, path):
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"{MC_MAGIC} {MC_VERSION}\n")
            fh.write(f"classes={self.n_classes}\n")
            for bank in self.banks:
                fh.write(bank.dumps())

    @classmethod
    def load(cls, path) -> "MultiClassMachine":
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.read().splitlines()
        if not lines or not lines[0].startswith(MC_MAGIC):
            raise TsetlinError(f"not a {MC_MAGIC} file")
        if int(lines[0].split()[1]) != MC_VERSION:
            raise TsetlinError(f"unsupported model version {lines[0].split()[1]}")
        n_classes = int(lines[1].split("=")[1])
        banks = []
        cursor = 2
        for _ in range(n_classes):
            bank, cursor = TsetlinMachine._parse_block(lines, cursor)
            banks.append(bank)
        if not banks:
            raise TsetlinError("empty model file")
        return cls(banks[0].config, n_classes, banks)
