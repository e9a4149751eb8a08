"""Command-line front door: gen, train, eval, inspect, payoff, bench.

Exit status: 0 on success, 2 on usage/configuration errors, 1 on runtime
failures. Every command is deterministic under --seed.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import benchmarks
from .analysis import (
    PayoffEnvironment,
    critical_s,
    monte_carlo_payoff,
    nash_check,
    payoff_exclude_balanced,
    payoff_include_balanced,
)
from .automaton import Action
from .datasets import gen_noisy_xor, load_dataset, save_dataset
from .errors import (
    ConfigError,
    DatasetFormatError,
    TsetlinError,
    WidthMismatchError,
)
from .machine import MODEL_MAGIC, MachineConfig, TsetlinMachine
from .multiclass import MC_MAGIC, MultiClassMachine


def _load_any_model(path):
    with open(path, "r", encoding="ascii") as fh:
        first = fh.readline()
    if first.startswith(MC_MAGIC):
        return MultiClassMachine.load(path)
    if first.startswith(MODEL_MAGIC):
        return TsetlinMachine.load(path)
    raise TsetlinError(f"{path} is not a recognized model file")


def _machine_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--clauses", type=int, default=20, help="clause count m (even)")
    parser.add_argument("--T", type=int, default=15, help="vote-clipping threshold")
    parser.add_argument("--s", type=float, default=3.9, help="precision (> 1)")
    parser.add_argument(
        "--state-bits", type=int, default=7,
        help="bits per automaton state; 2N = 2**b states",
    )
    parser.add_argument("--boost", action="store_true",
                        help="boost true-positive include feedback")
    parser.add_argument("--epochs", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsetlin",
        description="Train, evaluate, and inspect Tsetlin machines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a dataset file")
    gen_sub = p_gen.add_subparsers(dest="generator", required=True)
    p_xor = gen_sub.add_parser("xor", help="noisy XOR with non-informative inputs")
    p_xor.add_argument("--count", type=int, default=10000)
    p_xor.add_argument("--width", type=int, default=12, help="number of inputs o")
    p_xor.add_argument("--noise", type=float, default=0.4)
    p_xor.add_argument("--informative", default="1,2",
                       help="two 1-based informative positions, e.g. 1,2")
    p_xor.add_argument("--seed", type=int, default=0)
    p_xor.add_argument("--out", required=True)

    p_train = sub.add_parser("train", help="train a machine on a dataset file")
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--test", help="optional eval dataset tracked per epoch")
    p_train.add_argument("--out", required=True, help="model file to write")
    p_train.add_argument("--report-csv", help="write per-epoch accuracies as CSV")
    p_train.add_argument(
        "--machine", choices=("auto", "binary", "multiclass"), default="auto",
        help="binary single-output machine or per-class banks (auto: by label count)",
    )
    p_train.add_argument("--quiet", action="store_true")
    _machine_flags(p_train)

    p_eval = sub.add_parser("eval", help="accuracy of a model on a dataset")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--data", required=True)

    p_inspect = sub.add_parser("inspect", help="dump surviving clauses")
    p_inspect.add_argument("--model", required=True)

    p_payoff = sub.add_parser("payoff", help="expected feedback payoffs and Nash verdict")
    p_payoff.add_argument("--theta", type=float)
    p_payoff.add_argument("--delta", type=float, default=0.0)
    p_payoff.add_argument("--s", type=float)
    p_payoff.add_argument("--thetas", help="comma list for grid mode")
    p_payoff.add_argument("--deltas", default="0.0")
    p_payoff.add_argument("--ss", help="comma list of s values for grid mode")
    p_payoff.add_argument("--monte-carlo", type=int, default=0, metavar="TRIALS",
                          help="also estimate payoffs by simulation")
    p_payoff.add_argument("--mc-seed", type=int, default=0)
    p_payoff.add_argument("--out", help="write grid CSV here (default stdout)")

    p_bench = sub.add_parser("bench", help="seeded replications of an experiment")
    p_bench.add_argument("experiment", help=f"one of {sorted(benchmarks.EXPERIMENTS)}")
    p_bench.add_argument("--replications", type=int, default=10)
    p_bench.add_argument("--seed", type=int, default=1)
    p_bench.add_argument(
        "--workers", type=int,
        default=int(os.environ.get("TSETLIN_WORKERS", "1")),
        help="parallel replication slots (env TSETLIN_WORKERS)",
    )
    p_bench.add_argument("--data", help="dataset file/dir for iris/digits/mnist")
    p_bench.add_argument("--out", help="write per-replication CSV here")
    p_bench.add_argument("--clauses", type=int)
    p_bench.add_argument("--epochs", type=int)
    p_bench.add_argument("--count", type=int)
    p_bench.add_argument("--train-limit", type=int)

    return parser


def _cmd_gen(args) -> int:
    try:
        k1, k2 = (int(v) for v in args.informative.split(","))
    except ValueError:
        raise ConfigError(f"--informative must be 'i,j', got {args.informative!r}")
    data = gen_noisy_xor(args.count, o=args.width, noise=args.noise,
                         informative=(k1, k2), seed=args.seed)
    save_dataset(data, args.out)
    print(f"wrote {data.count} rows of width {data.o} to {args.out}")
    return 0


def _cmd_train(args) -> int:
    train = load_dataset(args.data)
    test = load_dataset(args.test) if args.test else None
    config = MachineConfig(
        o=train.o, clauses=args.clauses, T=args.T, s=args.s,
        state_bits=args.state_bits, boost=args.boost, epochs=args.epochs,
        seed=args.seed,
    )
    multiclass = args.machine == "multiclass" or (
        args.machine == "auto" and train.n_classes > 2
    )
    machine = (
        MultiClassMachine(config, train.n_classes) if multiclass
        else TsetlinMachine(config)
    )
    progress = None
    if not args.quiet:
        def progress(e):
            row = f"epoch {e.epoch:4d}  train_acc {e.train_accuracy:.4f}"
            if e.test_accuracy is not None:
                row += f"  test_acc {e.test_accuracy:.4f}"
            print(row)

    report = machine.fit(train, test, progress=progress)
    machine.save(args.out)
    if args.report_csv:
        with open(args.report_csv, "w", encoding="ascii") as fh:
            fh.write(report.to_csv_text())
    kind = "multiclass" if multiclass else "binary"
    print(f"wrote {kind} model to {args.out}")
    if report.final_train_accuracy is not None:
        print(f"final train_acc {report.final_train_accuracy:.4f}")
    if report.final_test_accuracy is not None:
        print(f"final test_acc {report.final_test_accuracy:.4f}")
    return 0


def _cmd_eval(args) -> int:
    machine = _load_any_model(args.model)
    data = load_dataset(args.data)
    acc = machine.evaluate(data)
    print(f"accuracy {acc:.4f} ({data.count} examples)")
    return 0


def _cmd_inspect(args) -> int:
    machine = _load_any_model(args.model)
    banks = machine.banks if isinstance(machine, MultiClassMachine) else [machine]
    for c, bank in enumerate(banks):
        if len(banks) > 1:
            print(f"class {c}:")
        exprs = bank.prune()
        if not exprs:
            print("no clauses (every literal excluded everywhere)")
            continue
        o = bank.config.o
        for expr in exprs:
            tag = "  CONTRADICTION" if expr.contradictory else ""
            print(f"{expr.to_dnf()}   [mask: {expr.to_mask(o)}]{tag}")
    return 0


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise ConfigError(f"bad numeric list {text!r}")


def _payoff_row(theta: float, delta: float, s: float) -> dict:
    return {
        "theta": theta,
        "delta": delta,
        "s": s,
        "exclude_payoff": payoff_exclude_balanced(theta, delta, s),
        "include_payoff": payoff_include_balanced(theta, delta, s),
        "verdict": nash_check(theta, delta, s).value,
        "critical_s": critical_s(theta, delta),
    }


def _cmd_payoff(args) -> int:
    grid_mode = args.thetas is not None or args.ss is not None
    if grid_mode:
        if args.thetas is None or args.ss is None:
            raise ConfigError("grid mode needs both --thetas and --ss")
        rows = [
            _payoff_row(theta, delta, s)
            for theta in _parse_grid(args.thetas)
            for delta in _parse_grid(args.deltas)
            for s in _parse_grid(args.ss)
        ]
        lines = ["theta,delta,s,exclude_payoff,include_payoff,verdict,critical_s"]
        for r in rows:
            lines.append(
                f"{r['theta']:.6g},{r['delta']:.6g},{r['s']:.6g},"
                f"{r['exclude_payoff']:.9g},{r['include_payoff']:.9g},"
                f"{r['verdict']},{r['critical_s']:.6g}"
            )
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="ascii") as fh:
                fh.write(text)
            print(f"wrote {len(rows)} grid rows to {args.out}")
        else:
            sys.stdout.write(text)
        return 0

    if args.theta is None or args.s is None:
        raise ConfigError("need --theta and --s (or --thetas/--ss for a grid)")
    r = _payoff_row(args.theta, args.delta, args.s)
    for key in ("theta", "delta", "s"):
        print(f"{key}={r[key]:g}")
    print(f"exclude_payoff={r['exclude_payoff']:.9g}")
    print(f"include_payoff={r['include_payoff']:.9g}")
    print(f"verdict={r['verdict']}")
    print(f"critical_s={r['critical_s']:.6g}")
    if args.monte_carlo:
        env = PayoffEnvironment.balanced(args.theta, args.delta, args.s)
        rng = np.random.default_rng(args.mc_seed)
        for action, label in ((Action.EXCLUDE, "exclude"), (Action.INCLUDE, "include")):
            mean, se = monte_carlo_payoff(env, action, args.monte_carlo, rng)
            print(f"mc_{label}_payoff={mean:.6g} stderr={se:.3g}")
    return 0


def _cmd_bench(args) -> int:
    overrides = {}
    for key in ("data", "clauses", "epochs", "count", "train_limit"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    summary = benchmarks.run_benchmark(
        args.experiment, args.replications, base_seed=args.seed,
        workers=args.workers, **overrides,
    )
    print(summary.text())
    sys.stdout.write(summary.summary_csv())
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(summary.replications_csv())
        print(f"wrote per-replication accuracies to {args.out}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "inspect": _cmd_inspect,
    "payoff": _cmd_payoff,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, DatasetFormatError, WidthMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (TsetlinError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
