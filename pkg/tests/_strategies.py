"""Hypothesis strategies shared by the test modules."""
from hypothesis import strategies as st

from lattlang.alphabet import DEFAULT_ALPHABET
from lattlang.expressions import Expression

SYMBOLS = [s for s in DEFAULT_ALPHABET if s != DEFAULT_ALPHABET.spacer]


def expressions(lo=-12, hi=12, max_support=20):
    return st.dictionaries(st.integers(lo, hi), st.sampled_from(SYMBOLS), max_size=max_support).map(Expression)


def words(min_size=1, max_size=6):
    return st.lists(st.sampled_from(SYMBOLS), min_size=min_size, max_size=max_size).map("".join)
