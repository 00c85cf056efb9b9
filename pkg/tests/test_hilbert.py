import cmath
import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from _strategies import expressions
from lattlang.alphabet import Alphabet
from lattlang.expressions import Expression
from lattlang.hilbert import (
    BasisLabel,
    IntervalProjector,
    LatticeSpace,
    StateError,
    StateVector,
    blank_label,
    dumps_state,
    inner_product,
    loads_state,
    projector_prob,
    superpose,
)

SPACE = LatticeSpace(n_internal=2, bound=12)
SMALL = LatticeSpace(n_internal=1, bound=4, alphabet=Alphabet(("0", "1", "#"), "#"))


def label(cfg=None, internal=0, position=0):
    return BasisLabel(internal, position, Expression(cfg or {}))


def test_superpose_examples():
    b1, b2 = label({0: "0"}), label({0: "1"})
    assert superpose([(b1, 1)], SPACE)[b1] == 1
    psi = superpose([(b1, 1), (b2, 1)], SPACE)
    assert psi[b1] == pytest.approx(1 / math.sqrt(2)) and psi[b2] == pytest.approx(1 / math.sqrt(2))
    with pytest.raises(StateError):
        superpose([(b1, 1), (b1, -1)], SPACE)


def test_inner_product_examples():
    b1, b2 = label({0: "0"}), label({0: "1"})
    e1, e2 = StateVector.basis(SPACE, b1), StateVector.basis(SPACE, b2)
    assert inner_product(e1, e1) == 1
    assert inner_product(e1, e2) == 0


states = st.lists(st.tuples(expressions(-4, 4, 4), st.integers(0, 1), st.integers(-4, 4),
                            st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)),
                  min_size=1, max_size=6)


def make(terms):
    acc = {}
    for cfg, i, x, a in terms:
        acc[BasisLabel(i, x, cfg)] = acc.get(BasisLabel(i, x, cfg), 0) + a
    if sum(abs(a) ** 2 for a in acc.values()) < 1e-6:
        acc = {blank_label(): 1.0}
    return superpose(acc.items(), SPACE)


@given(states, states)
def test_hermitian_symmetry(t1, t2):
    psi, phi = make(t1), make(t2)
    assert inner_product(psi, phi) == pytest.approx(inner_product(phi, psi).conjugate(), abs=1e-12)


def test_projector_examples():
    b = label({0: "0", 1: "1"})
    p = IntervalProjector(0, 1, ("0", "1"))
    assert projector_prob(StateVector.basis(SPACE, b), p) == 1
    assert projector_prob(StateVector.basis(SPACE, label({0: "0", 1: "0"})), p) == 0
    psi = superpose([(b, 1), (label({0: "1"}), 1)], SPACE)
    assert projector_prob(psi, p) == pytest.approx(0.5)


@given(states, st.floats(0, 2 * math.pi))
def test_projector_phase_invariant(terms, phase):
    psi = make(terms)
    p = IntervalProjector(-1, 0, ("#", "0"))
    assert projector_prob(psi.scaled(cmath.exp(1j * phase)), p) == pytest.approx(projector_prob(psi, p), abs=1e-12)


@settings(max_examples=30)
@given(states, st.integers(-4, 2), st.integers(1, 2))
def test_projector_completeness(terms, a, width):
    psi = make(terms)
    b = a + width - 1
    total = sum(projector_prob(psi, IntervalProjector(a, b, s))
                for s in itertools.product(SPACE.alphabet, repeat=width))
    assert abs(total - 1) <= 1e-10


def test_projectors_are_orthogonal():
    labels = [BasisLabel(0, 0, Expression({0: s, 1: t})) for s in "01#" for t in "01#"]
    projs = [IntervalProjector(0, 1, s) for s in itertools.product("01#", repeat=2)]
    for lab in labels:
        assert sum(p.matches(lab.config) for p in projs) == 1


def test_label_must_fit_lattice():
    with pytest.raises(StateError):
        StateVector.basis(SMALL, BasisLabel(0, 5, Expression()))
    with pytest.raises(StateError):
        StateVector.basis(SMALL, BasisLabel(0, 0, Expression({0: "c"})))
    with pytest.raises(StateError):
        StateVector.basis(SMALL, BasisLabel(1, 0, Expression()))


@given(states)
def test_state_csv_round_trip(terms):
    psi = make(terms)
    back = loads_state(dumps_state(psi), SPACE)
    assert dict(back.items()) == dict(psi.items())
