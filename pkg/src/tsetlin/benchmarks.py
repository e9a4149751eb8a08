"""Seeded replications of the reference experiments.

Each runner is a pure function of its seed (plus data paths), so
replications can run in parallel worker processes and still reproduce
bit-for-bit. Test labels are never noisy: the XOR runner generates a clean
dataset, splits, then flips training labels only.
"""

from __future__ import annotations

import inspect
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .datasets import (
    BinaryDataset,
    binarize_threshold,
    feature_ranges,
    flip_labels,
    gen_noisy_xor,
    load_csv,
    load_mnist,
    quantize_bits,
    split,
)
from .errors import ConfigError
from .machine import ClauseExpression, MachineConfig, TsetlinMachine
from .multiclass import MultiClassMachine


def clauses_per_bank(total: int, n_classes: int) -> int:
    """Split a total clause budget across class banks, keeping counts even."""
    per = total // n_classes
    per -= per % 2
    if per < 2:
        raise ConfigError(
            f"{total} clauses cannot cover {n_classes} banks with >= 2 each"
        )
    return per


def run_xor(
    seed: int,
    count: int = 10000,
    o: int = 12,
    noise: float = 0.4,
    train_fraction: float = 0.5,
    clauses: int = 20,
    s: float = 3.9,
    T: int = 15,
    state_bits: int = 7,
    epochs: int = 200,
) -> float:
    """Noisy-XOR replication (two-class machine, `clauses` split across the
    two banks); returns final test accuracy on clean labels."""
    clean = gen_noisy_xor(count, o=o, noise=0.0, seed=seed)
    train, test = split(clean, train_fraction, seed=seed + 1)
    train = flip_labels(train, noise, seed=seed + 2)
    machine = MultiClassMachine(
        MachineConfig(o=o, clauses=clauses_per_bank(clauses, 2), T=T, s=s,
                      state_bits=state_bits, epochs=epochs, seed=seed),
        2,
    )
    machine.fit(train)
    return machine.evaluate(test)


_XOR_MINTERMS = ((0, 1, 0, 0), (0, 0, 1, 0))  # ~x1&x2 and x1&~x2 over (x1,x2)


def _truth_table(expr: ClauseExpression) -> tuple[int, ...]:
    return tuple(
        expr.evaluate(np.array([x1, x2], dtype=np.uint8))
        for x1 in (0, 1)
        for x2 in (0, 1)
    )


@dataclass
class XorShapeResult:
    reached_full_train: bool
    shapes_match: bool
    expressions: list[ClauseExpression] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.reached_full_train and self.shapes_match


def run_xor_noiseless(
    seed: int,
    count: int = 400,
    clauses: int = 20,
    s: float = 3.9,
    T: int = 15,
    state_bits: int = 7,
    epochs: int = 200,
) -> XorShapeResult:
    """Exact-representability run on 2-variable noiseless XOR: did training hit
    100% train accuracy, and do the surviving positive clauses carry exactly
    the two XOR minterm shapes?"""
    data = gen_noisy_xor(count, o=2, noise=0.0, seed=seed)
    machine = TsetlinMachine(
        MachineConfig(o=2, clauses=clauses, T=T, s=s, state_bits=state_bits,
                      epochs=epochs, seed=seed)
    )
    report = machine.fit(data)
    reached = any(e.train_accuracy == 1.0 for e in report.epochs)
    positives = [e for e in machine.prune() if e.polarity > 0]
    tables = {_truth_table(e) for e in positives}
    shapes = (
        bool(positives)
        and tables <= set(_XOR_MINTERMS)
        and tables >= set(_XOR_MINTERMS)
        and all(_truth_table(e) in _XOR_MINTERMS for e in positives)
    )
    return XorShapeResult(reached, shapes, positives)


def _quantized_split(
    values: np.ndarray,
    labels: np.ndarray,
    bits_per_feature: int,
    train_fraction: float,
    seed: int,
    n_classes: int,
) -> tuple[BinaryDataset, BinaryDataset]:
    """Split raw rows, then quantize both sides with training-split ranges."""
    perm = np.random.default_rng(seed).permutation(len(values))
    n_train = int(len(values) * train_fraction)
    tr, te = perm[:n_train], perm[n_train:]
    ranges = feature_ranges(values[tr])
    return (
        BinaryDataset(quantize_bits(values[tr], bits_per_feature, ranges),
                      labels[tr], n_classes),
        BinaryDataset(quantize_bits(values[te], bits_per_feature, ranges),
                      labels[te], n_classes),
    )


def run_iris(
    seed: int,
    data: str,
    clauses: int = 300,
    s: float = 3.0,
    T: int = 10,
    state_bits: int = 7,
    epochs: int = 500,
    boost: bool = True,
    bits_per_feature: int = 4,
    train_fraction: float = 0.8,
) -> float:
    values, labels = load_csv(data)
    n_classes = int(labels.max()) + 1
    train, test = _quantized_split(
        values, labels, bits_per_feature, train_fraction, seed, n_classes
    )
    machine = MultiClassMachine(
        MachineConfig(o=train.o, clauses=clauses_per_bank(clauses, n_classes),
                      T=T, s=s, state_bits=state_bits, boost=boost,
                      epochs=epochs, seed=seed),
        n_classes,
    )
    machine.fit(train)
    return machine.evaluate(test)


def run_digits(
    seed: int,
    data: str,
    clauses: int = 1000,
    s: float = 3.0,
    T: int = 10,
    state_bits: int = 10,
    epochs: int = 300,
    boost: bool = True,
    bits_per_feature: int = 3,
    train_fraction: float = 0.8,
) -> float:
    return run_iris(
        seed, data, clauses=clauses, s=s, T=T, state_bits=state_bits,
        epochs=epochs, boost=boost, bits_per_feature=bits_per_feature,
        train_fraction=train_fraction,
    )


def run_mnist(
    seed: int,
    data: str,
    clauses: int = 2000,
    s: float = 10.0,
    T: int = 50,
    state_bits: int = 8,
    epochs: int = 20,
    boost: bool = True,
    threshold: float = 0.3,
    train_limit: int | None = None,
) -> float:
    """Reduced-scale MNIST replication over user-supplied data files."""
    (x_tr, y_tr), (x_te, y_te) = load_mnist(data)
    if train_limit:
        x_tr, y_tr = x_tr[:train_limit], y_tr[:train_limit]
    train = BinaryDataset(binarize_threshold(x_tr, threshold), y_tr, 10)
    test = BinaryDataset(binarize_threshold(x_te, threshold), y_te, 10)
    machine = MultiClassMachine(
        MachineConfig(o=train.o, clauses=clauses, T=T, s=s, state_bits=state_bits,
                      boost=boost, epochs=epochs, seed=seed),
        10,
    )
    machine.fit(train)
    return machine.evaluate(test)


def run_xor_noiseless_ok(seed: int, **kwargs) -> float:
    return float(run_xor_noiseless(seed, **kwargs).ok)


EXPERIMENTS = {
    "xor": (run_xor, False),
    "xor-noiseless": (run_xor_noiseless_ok, False),
    "iris": (run_iris, True),
    "digits": (run_digits, True),
    "mnist": (run_mnist, True),
}


@dataclass
class BenchSummary:
    name: str
    seeds: list[int]
    accuracies: list[float]

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def ci95(self) -> float | None:
        if len(self.accuracies) < 2:
            return None
        return 1.96 * float(np.std(self.accuracies, ddof=1)) / math.sqrt(
            len(self.accuracies)
        )

    def stats(self) -> dict:
        acc = np.array(self.accuracies)
        return {
            "mean": self.mean,
            "ci95": self.ci95,
            "p5": float(np.percentile(acc, 5)),
            "p95": float(np.percentile(acc, 95)),
            "min": float(acc.min()),
            "max": float(acc.max()),
        }

    def text(self) -> str:
        st = self.stats()
        if self.ci95 is None:
            head = f"mean {100 * st['mean']:.2f}"
        else:
            head = f"mean {100 * st['mean']:.2f} +/- {100 * st['ci95']:.2f} (95% CI)"
        return (
            f"experiment {self.name}: {len(self.accuracies)} replication(s)\n"
            f"{head}  5%ile {100 * st['p5']:.2f}  95%ile {100 * st['p95']:.2f}"
            f"  min {100 * st['min']:.2f}  max {100 * st['max']:.2f}"
        )

    def summary_csv(self) -> str:
        st = self.stats()
        ci = "" if st["ci95"] is None else f"{st['ci95']:.6f}"
        return (
            "experiment,replications,mean,ci95,p5,p95,min,max\n"
            f"{self.name},{len(self.accuracies)},{st['mean']:.6f},{ci},"
            f"{st['p5']:.6f},{st['p95']:.6f},{st['min']:.6f},{st['max']:.6f}\n"
        )

    def replications_csv(self) -> str:
        lines = ["replication,seed,accuracy"]
        for i, (seed, acc) in enumerate(zip(self.seeds, self.accuracies)):
            lines.append(f"{i},{seed},{acc:.6f}")
        return "\n".join(lines) + "\n"


def _call(args):
    fn, seed, kwargs = args
    return fn(seed, **kwargs)


def run_benchmark(
    name: str,
    replications: int,
    base_seed: int = 1,
    workers: int = 1,
    **kwargs,
) -> BenchSummary:
    if name not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}"
        )
    if replications < 1:
        raise ConfigError("replications must be positive")
    fn, needs_data = EXPERIMENTS[name]
    if needs_data and not kwargs.get("data"):
        raise ConfigError(f"experiment {name!r} requires --data")
    accepted = set(inspect.signature(fn).parameters) - {"seed"}
    unknown = set(kwargs) - accepted
    if unknown:
        raise ConfigError(
            f"experiment {name!r} does not accept {sorted(unknown)}"
        )
    seeds = [base_seed + i for i in range(replications)]
    jobs = [(fn, seed, kwargs) for seed in seeds]
    if workers > 1 and replications > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            accs = list(pool.map(_call, jobs))
    else:
        accs = [_call(job) for job in jobs]
    return BenchSummary(name, seeds, [float(a) for a in accs])
