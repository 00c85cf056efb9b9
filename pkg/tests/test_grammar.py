import pytest

from lattlang.grammar import SHIPPED_GRAMMAR, GrammarError, formula_key, is_formula


@pytest.mark.parametrize("text", ["(0=0)", "(f(c)=v)", "r(1)", "¬r(0)", "((0=0)∨(1=1))", "∃v(v=0)", "¬¬(0=1)"])
def test_accepts(text):
    assert is_formula(text)


@pytest.mark.parametrize("text", ["", "((", "0=0", "(0=0", "¬", "(0=0)(0=0)", "∃c(c=0)", "f(0)", "(0=0)∨(1=1)"])
def test_rejects(text):
    assert not is_formula(text)
    with pytest.raises(GrammarError):
        SHIPPED_GRAMMAR.parse(text)


def test_no_formula_is_a_proper_prefix_of_another():
    short = [f for n in range(1, 9) for f in SHIPPED_GRAMMAR.formulas(n)]
    pool = set(short)
    for f in short:
        for cut in range(1, len(f)):
            assert f[:cut] not in pool


def test_formulas_by_length_are_sorted_and_complete():
    counts = [len(SHIPPED_GRAMMAR.formulas(n)) for n in range(1, 9)]
    assert counts == [0, 0, 0, 4, 20, 24, 48, 104]
    fs = SHIPPED_GRAMMAR.formulas(7)
    assert list(fs) == sorted(fs, key=formula_key)
    assert all(len(f) == 7 and is_formula(f) for f in fs)
