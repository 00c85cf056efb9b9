
import pytest
from hypothesis import given, settings, strategies as st

from _oracles import brute_force_proofs, is_k_instance
from lattlang.grammar import GrammarError, is_formula
from lattlang.theory_engine import (
    Meaning,
    Mode,
    Theory,
    axiom_complexity,
    check_proof,
    disj,
    enumerate_theorems,
    extend_theory,
    evaluate_meaning,
    find_inconsistency_proof,
    generate_complexity_pair,
    imp,
    literal_pool,
    models,
    neg,
    proof_key,
    satisfiable,
    schema_of,
    serialize_axioms,
    short_inconsistency_length,
    shortest_inconsistency_proof,
)

A, B, C = "(0=0)", "(0=1)", "(1=1)"


def test_check_proof_examples():
    T = Theory.of([A, imp(A, B)])
    assert check_proof([A, imp(A, B), B], T)
    assert not check_proof([B], T)
    assert not check_proof([A, C], Theory.of([A], [C]))
    assert not check_proof([B, imp(A, B), A], T)


def test_check_proof_rejects_ungrammatical_lines():
    with pytest.raises(GrammarError):
        check_proof([A, "((0=0)"], Theory.of([A]))


def test_lines_outside_the_language_are_invalid():
    k = imp(A, imp(C, A))
    assert schema_of(k) == "K"
    assert check_proof([k], Theory.of([A], [C]))
    assert not check_proof([k], Theory.of([A]))


@pytest.mark.parametrize("f, name", [
    (imp(A, imp(B, A)), "K"),
    (imp(imp(A, imp(B, C)), imp(imp(A, B), imp(A, C))), "S"),
    (imp(imp(neg(A), neg(B)), imp(B, A)), "CONTRA"),
    (imp(A, imp(B, C)), None),
    (neg(A), None),
])
def test_schemas(f, name):
    assert schema_of(f) == name


def test_modus_ponens_with_logical_axioms():
    # A, A→(B→A), B→A
    k = imp(A, imp(B, A))
    assert check_proof([A, k, imp(B, A)], Theory.of([A], [B]))


def test_enumeration_starts_with_the_axiom():
    stream = enumerate_theorems(Theory.of([A]), 500)
    first = next(iter(stream))
    assert first.lines == (A,) and first.mode is Mode.CONSISTENT


def test_single_axiom_theory_stays_consistent():
    stream = enumerate_theorems(Theory.of([A]), 20_000)
    emitted = list(stream)
    assert stream.mode is Mode.CONSISTENT and stream.flipped_at is None
    assert len(emitted) > 500
    keys = [proof_key(e.lines) for e in emitted]
    assert keys == sorted(keys)


def test_flip_at_a_not_a():
    T = Theory.of([A, neg(A)])
    stream = enumerate_theorems(T, 200)
    emitted = list(stream)
    assert stream.flipped_at == (A, neg(A))
    before = [e.lines for e in emitted if e.mode is Mode.CONSISTENT]
    assert before == [(A,), (neg(A),), (A, A), (neg(A), A)]
    after = [e.lines for e in emitted if e.mode is Mode.INCONSISTENT][1:]
    assert all(len(lines) == 1 and is_formula(lines[0]) for lines in after)
    assert [lines[0] for lines in after[:4]] == ["r(0)", "r(1)", "r(c)", "r(v)"]


def test_budget_one():
    assert len(list(enumerate_theorems(Theory.of([A]), 1))) <= 1


def test_shortest_inconsistency_examples():
    assert shortest_inconsistency_proof(Theory.of([A, neg(A)]), 4) == 2
    assert shortest_inconsistency_proof(Theory.of([A]), 6) is None
    proof = find_inconsistency_proof(Theory.of([A, imp(A, B), neg(B)]), 5)
    assert proof == (A, imp(A, B), B, neg(B))
    assert check_proof(proof, Theory.of([A, imp(A, B), neg(B)]))


def test_short_inconsistency_lemma():
    assert short_inconsistency_length(Theory.of([A, neg(A)])) == 2
    assert short_inconsistency_length(Theory.of([A, disj(neg(A), neg(A))])) == 3
    assert short_inconsistency_length(Theory.of([A, imp(A, B), neg(B)])) is None
    # ¬K is refuted in two lines because K needs no axiom
    k = imp(A, imp(B, A))
    assert short_inconsistency_length(Theory.of([neg(k)])) == 2


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from(literal_pool()), min_size=2, max_size=4, unique=True))
def test_bfs_agrees_with_lemma(axioms):
    T = Theory.of(axioms)
    found = shortest_inconsistency_proof(T, 8)
    short = short_inconsistency_length(T)
    if short is not None:
        assert found == short
    elif found is not None:
        assert found >= 4
    if found is not None:
        assert not satisfiable(T)


def test_axiom_complexity():
    assert axiom_complexity(Theory.of([])) == 16
    a, b = axiom_complexity(Theory.of([A])), axiom_complexity(Theory.of([neg(A)]))
    assert b - a == 4
    assert axiom_complexity(Theory.of([A, B])) == 16 + 2 * (16 + 4 * 5)
    assert len(serialize_axioms(Theory.of([B, A]))) == axiom_complexity(Theory.of([A, B]))


def test_extend_theory():
    T = Theory.of([A])
    U = extend_theory(T, [B])
    assert check_proof([A], U) and check_proof([B], U)
    assert extend_theory(T, []) == T
    assert extend_theory(T, [A]).axioms == T.axioms
    with pytest.raises(GrammarError):
        extend_theory(T, ["(0="])


@settings(max_examples=10, deadline=None)
@given(st.lists(st.sampled_from(literal_pool()), min_size=1, max_size=2, unique=True),
       st.lists(st.sampled_from(literal_pool()), max_size=2))
def test_extension_is_monotone(axioms, extra):
    T = Theory.of(axioms)
    U = extend_theory(T, extra)
    for em in enumerate_theorems(T, 400):
        if em.mode is Mode.CONSISTENT and len(em.lines) <= 4:
            assert check_proof(em.lines, U)


def test_truth_table_models():
    assert list(models(Theory.of([A, imp(A, B)]))) == [{A: True, B: True}]
    assert not satisfiable(Theory.of([A, imp(A, B), neg(B)]))


# -- completeness against an independent brute force ------------------------------

def stream_prefix(T, max_total, budget):
    stream = enumerate_theorems(T, budget)
    out = []
    for em in stream:
        if len("#".join(em.lines)) > max_total:
            break
        out.append(em.lines)
    else:
        pytest.fail("budget ran out before the stream passed the length limit")
    return out


def test_completeness_up_to_12_symbols_three_atoms():
    atoms = ["r(0)", "r(1)", "(0=0)"]
    axioms = ["r(0)", imp("r(0)", "r(1)"), neg("r(1)")]
    T = Theory.of(axioms, atoms)
    assert stream_prefix(T, 12, 100_000) == brute_force_proofs(atoms, set(axioms), 12)


def test_completeness_with_modus_ponens_and_k():
    atoms = ["r(0)", "r(1)"]
    axioms = ["r(0)", imp("r(0)", "r(1)")]
    T = Theory.of(axioms, atoms)
    expected = brute_force_proofs(atoms, set(axioms), 24)
    assert ("r(0)", imp("r(0)", "r(1)"), "r(1)") in expected
    assert any(is_k_instance(p[0]) for p in expected)
    assert stream_prefix(T, 24, 400_000) == expected


# -- meaning ----------------------------------------------------------------------

W = Meaning("w", "v1", True, "nw")


def test_meaning_examples():
    assert evaluate_meaning([(1.0, "w v1")], [W]).valid
    assert not evaluate_meaning([(1.0, "w 01")], [W]).valid
    report = evaluate_meaning([(0.6, ["w", "v1"]), (0.8, ["nw"])], [W])
    assert report.path_consistent and report.complete and report.valid
    assert not evaluate_meaning([(1.0, "w v1 nw")], [W]).path_consistent
    assert not evaluate_meaning([(1.0, "v1")], [W]).complete


def test_meaning_requires_normalized_branches():
    with pytest.raises(ValueError):
        evaluate_meaning([(1.0, "w"), (1.0, "v1")], [W])


def test_negative_meaning():
    absent = Meaning("q", "v1", occurs=False)
    assert evaluate_meaning([(1.0, "q 0")], [absent]).valid
    assert not evaluate_meaning([(1.0, "q v1")], [absent]).valid


# -- complexity pair ------------------------------------------------------------------

@pytest.mark.parametrize("seed", [0, 1, 2])
def test_complexity_pair(seed):
    pair = generate_complexity_pair(seed)
    assert pair.verified
    assert satisfiable(pair.T1) and not satisfiable(pair.T2)
    assert pair.shortest2 >= 4 and short_inconsistency_length(pair.T2) is None
    assert abs(pair.bits1 - pair.bits2) <= 8
    assert check_proof(pair.proof2, pair.T2)
    assert generate_complexity_pair(seed).to_record() == pair.to_record()
