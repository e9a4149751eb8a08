import numpy as np
import pytest

from tsetlin.benchmarks import (
    BenchSummary,
    clauses_per_bank,
    run_benchmark,
    run_xor_noiseless,
)
from tsetlin.errors import ConfigError


def test_clauses_per_bank():
    assert clauses_per_bank(20, 2) == 10
    assert clauses_per_bank(300, 3) == 100
    assert clauses_per_bank(1000, 10) == 100
    assert clauses_per_bank(7, 2) == 2  # floors to even
    with pytest.raises(ConfigError):
        clauses_per_bank(2, 3)


def test_summary_statistics():
    summary = BenchSummary("demo", [1, 2, 3, 4], [0.9, 1.0, 0.8, 0.9])
    stats = summary.stats()
    assert stats["mean"] == pytest.approx(0.9)
    assert stats["min"] == 0.8 and stats["max"] == 1.0
    assert stats["ci95"] == pytest.approx(
        1.96 * np.std([0.9, 1.0, 0.8, 0.9], ddof=1) / 2.0
    )
    assert "demo" in summary.text()
    assert summary.summary_csv().count("\n") == 2
    assert len(summary.replications_csv().splitlines()) == 5

    single = BenchSummary("demo", [1], [0.9])
    assert single.ci95 is None
    assert "+/-" not in single.text()


def test_unknown_experiment_and_bad_replications():
    with pytest.raises(ConfigError):
        run_benchmark("nope", 1)
    with pytest.raises(ConfigError):
        run_benchmark("xor", 0)
    with pytest.raises(ConfigError):
        run_benchmark("iris", 1)  # requires data


def test_replications_are_deterministic_and_parallelizable():
    kwargs = dict(count=400, epochs=15)
    serial = run_benchmark("xor", 2, base_seed=5, workers=1, **kwargs)
    parallel = run_benchmark("xor", 2, base_seed=5, workers=2, **kwargs)
    assert serial.accuracies == parallel.accuracies
    assert serial.seeds == [5, 6]


def test_xor_noiseless_result_shape():
    res = run_xor_noiseless(seed=2, count=200, epochs=60)
    assert res.ok == (res.reached_full_train and res.shapes_match)
    for expr in res.expressions:
        assert expr.polarity == 1
