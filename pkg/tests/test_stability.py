import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lattlang.dynamics import build_writer, random_sweep_step
from lattlang.hilbert import StateVector, blank_label
from lattlang.stability import (
    EXPONENTIAL,
    INDETERMINATE,
    POLYNOMIAL,
    TauTable,
    check_monotonicity,
    classify_efficiency,
    classify_points,
    dispersion,
    estimate_tau,
    limit_distribution,
    tau_table,
    writer_source,
)


def test_constant_trace():
    for m in (1, 10, 30):
        assert estimate_tau([0.7] * 21, m).value == 0


def test_writer_trace():
    trace = [0, 0] + [1] * 19
    for m in range(1, 31):
        assert estimate_tau(trace, m).value == 1


def test_oscillating_trace_is_censored():
    est = estimate_tau([0, 1] * 10 + [0], 1)
    assert est.censored and str(est) == "Censored(20)"


def test_late_jump_is_censored():
    # stable window shorter than half the horizon
    est = estimate_tau([0] * 15 + [1] * 6, 4)
    assert est.censored


traces = st.lists(st.floats(0, 1), min_size=3, max_size=40)


@given(traces, st.integers(1, 29), st.integers(1, 10))
def test_estimator_monotone_in_m(values, m, dm):
    a, b = estimate_tau(values, m), estimate_tau(values, m + dm)
    if not (a.censored or b.censored):
        assert a.value <= b.value
    if a.censored:
        assert b.censored


def test_writer_table():
    strings = {n: [("0",) * n, tuple("1v" * n)[:n]] for n in range(2, 9)}
    table = tau_table(writer_source(), strings, [1, 5, 30])
    assert all(e.value == n - 1 for (n, _), e in table.entries.items())
    assert check_monotonicity(table) == []


def test_prefix_monotonicity_on_writer():
    target = tuple("01cvf(=)")
    strings = {n: [target[:n]] for n in range(2, 9)}
    table = tau_table(writer_source(), strings, [10])
    series = [v for _, v in table.series(10)]
    assert series == sorted(series)


def test_censoring_soundness_on_writer():
    source = writer_source()
    for n in (2, 5, 7):
        s = ("v",) * n
        a = estimate_tau(source(n, s, 16), 10)
        b = estimate_tau(source(n, s, 32), 10)
        assert not a.censored and a.value == b.value


def test_max_over_strings_with_censoring():
    def source(n, s, T):
        if s == ("x",):
            return [0, 1] * (T // 2) + [0]
        return [0] * 2 + [1] * (T - 1)

    table = tau_table(source, {1: [("a",), ("x",)]}, [3], horizon=8, horizon_cap=16)
    assert table.entries[(1, 3)].censored
    single = tau_table(source, {1: [("a",)]}, [3], horizon=8)
    assert single.value(1, 3) == 1


def test_monotonicity_report():
    table = TauTable.from_values({(2, 3): 5, (3, 3): 4})
    assert check_monotonicity(table) == [((2, 3), (3, 3))]
    assert check_monotonicity(TauTable.from_values({(2, 3): 5})) == []


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_classifier_polynomial(ell):
    ns = [4, 6, 8, 10, 12]
    v = classify_points(ns, [2.5 * n ** ell for n in ns])
    assert v.kind == POLYNOMIAL
    assert abs(v.params["ell"] - ell) < 0.15 and abs(v.params["K"] - 2.5) < 0.15


def test_classifier_exponential():
    ns = [4, 6, 8, 10]
    v = classify_points(ns, [2.0 ** n for n in ns])
    assert v.kind == EXPONENTIAL
    assert abs(v.params["mu_free"] - 1) < 0.15 and abs(v.params["C"] - 1) < 0.15


def test_classifier_three_points():
    assert classify_points([4, 6, 8], [3, 5, 7]).kind == INDETERMINATE


def test_classifier_on_writer_values():
    # exact τ = n - 1; the log-log slope of n - 1 over these n is about 1.2
    table = TauTable.from_values({(n, 5): n - 1 for n in (4, 6, 8, 10)})
    v = classify_efficiency(table, 5)
    assert v.kind == POLYNOMIAL
    assert v.params["ell"] == pytest.approx(1.2004, abs=1e-4)


def test_dispersion_examples():
    assert dispersion({("0", "1"): 1.0}, "01").epsilon == 0
    assert dispersion({("0", "1"): 0.5, ("1", "1"): 0.5}, "01").epsilon == pytest.approx(0.5)
    with pytest.raises(ValueError):
        dispersion({("0",): 0.5}, "0")


def test_writer_limit_has_no_dispersion():
    U = build_writer("0c1")
    dist = limit_distribution(StateVector.basis(U.space, blank_label()), U, 0, 2, 10)
    assert dispersion(dist, "0c1").epsilon == 0


def test_sweep_limit_disperses():
    U = random_sweep_step(2, np.random.default_rng(4), bound=8)
    dist = limit_distribution(StateVector.basis(U.space, blank_label()), U, 0, 1, 6)
    assert math.isclose(sum(dist.values()), 1.0, abs_tol=1e-12)
    best = max(dist, key=dist.get)
    assert 0 < dispersion(dist, best).epsilon < 1
