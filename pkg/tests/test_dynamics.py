import json

import numpy as np
import pytest

from lattlang.alphabet import Alphabet
from lattlang.dynamics import (
    DimensionCapExceeded,
    RuleRow,
    UnitarityError,
    build_counter,
    build_step,
    build_writer,
    counter_overflow_time,
    dumps_trace,
    evolve,
    heisenberg_trace,
    identity_rows,
    loads_rules,
    probability_trace,
    random_local_step,
    random_sweep_step,
    rule_document,
)
from lattlang.expressions import Expression
from lattlang.hilbert import (
    BasisLabel,
    IntervalProjector,
    LatticeSpace,
    StateVector,
    blank_label,
    inner_product,
)

BITS = Alphabet(("0", "1", "#"), "#")


def blank(U):
    return StateVector.basis(U.space, blank_label())


def test_identity_rule_is_valid():
    space = LatticeSpace(2, 4, BITS)
    U = build_step(identity_rows(space), space)
    psi = blank(U)
    assert dict(evolve(psi, U, 7).items()) == dict(psi.items())


def test_two_inputs_one_output_rejected():
    space = LatticeSpace(1, 4, BITS)
    rows = [RuleRow(0, "0", 1.0, 0, "0", 0), RuleRow(0, "1", 1.0, 0, "0", 0), RuleRow(0, "#", 1.0, 0, "#", 0)]
    # from the blank tape the collision is never reached
    assert build_step(rows, space).validated_dim == 1
    with pytest.raises(UnitarityError, match="offending rule rows"):
        build_step(rows, space, start=[BasisLabel(0, 0, Expression({0: "1"}))])


def test_rule_must_be_total():
    with pytest.raises(UnitarityError, match="not total"):
        build_step([RuleRow(0, "0", 1.0, 0, "0", 0)], LatticeSpace(1, 4, BITS))


def test_writer_hand_simulation():
    U = build_writer("01")
    psi = evolve(blank(U), U, 1)
    (lab,) = list(psi)
    assert lab.config == Expression({0: "0"})
    for t in (2, 3, 6):
        (lab,) = list(evolve(blank(U), U, t))
        assert lab.config == Expression({0: "0", 1: "1"})
    trace = probability_trace(blank(U), U, IntervalProjector.for_word("01"), 6)
    assert trace.values == [0, 0, 1, 1, 1, 1, 1]
    spacers = probability_trace(blank(U), U, IntervalProjector.for_word("##"), 4)
    assert spacers.values == [1, 0, 0, 0, 0]


def test_writer_edge_cases():
    U = build_writer("")
    assert list(evolve(blank(U), U, 5))[0].config == Expression()
    with pytest.raises(UnitarityError):
        build_writer("0" * 14, bound=12)


def test_evolve_zero_steps_is_identity():
    U = build_writer("01")
    psi = blank(U)
    assert evolve(psi, U, 0) is psi


def test_locality_of_one_step():
    rng = np.random.default_rng(3)
    U = random_sweep_step(3, rng, bound=8)
    psi = evolve(blank(U), U, 2)
    for lab in psi:
        for out in U.image(lab):
            changed = {j for j in set(lab.config) | set(out.config) if lab.config.symbol_at(j) != out.config.symbol_at(j)}
            assert changed <= {lab.position}
            assert abs(out.position - lab.position) <= 1


@pytest.mark.parametrize("seed", range(3))
def test_reversibility(seed):
    rng = np.random.default_rng(seed)
    U = random_sweep_step(3, rng, bound=12)
    psi0 = blank(U)
    psi = evolve(psi0, U, 6)
    for _ in range(6):
        psi = U.apply_adjoint(psi)
    assert abs(inner_product(psi, psi0) - 1) < 1e-8


def test_heisenberg_matches_schroedinger_on_local_step():
    space = LatticeSpace(2, 3, BITS)
    U = random_local_step(space, np.random.default_rng(0))
    psi0 = blank(U)
    p = IntervalProjector(0, 0, ("1",))
    a = probability_trace(psi0, U, p, 25).values
    b = heisenberg_trace(psi0, U, p, 25).values
    assert np.allclose(a, b, atol=1e-8)
    assert 0 < max(a) < 1


def test_dimension_cap_is_an_error():
    with pytest.raises(DimensionCapExceeded, match="cap of 50"):
        random_sweep_step(4, np.random.default_rng(0), bound=12, dim_cap=50)


def test_counter_overflow_times():
    assert [counter_overflow_time(n) for n in range(1, 9)] == [2, 7, 18, 41, 88, 183, 374, 757]
    for n in (1, 2, 3, 4):
        U = build_counter(n)
        trace = probability_trace(blank(U), U, IntervalProjector.for_word("0" * n), counter_overflow_time(n) + 3)
        first = trace.values.index(1.0)
        assert first == counter_overflow_time(n)
        assert set(trace.values[first:]) == {1.0}


def test_rule_document_round_trip():
    U = build_writer("0v", bound=6)
    V = loads_rules(json.dumps(rule_document(U)), depth=6)
    assert V.rows == U.rows


def test_trace_csv():
    U = build_writer("1")
    text = dumps_trace(probability_trace(blank(U), U, IntervalProjector.for_word("1"), 2))
    assert text == "t,p\n0,0.0\n1,1.0\n2,1.0\n"
