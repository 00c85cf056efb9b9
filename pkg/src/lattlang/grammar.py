"""The shipped formula grammar over the 13-symbol alphabet.

    term    ::= 0 | 1 | c | v | f(term)
    atomic  ::= (term=term) | r(term)
    formula ::= atomic | ¬formula | (formula∨formula) | ∃v formula

Every production is closed by a distinct leading symbol or a closing
parenthesis, so the language is LL(1) and prefix-free: no formula is a
proper prefix of another.  That property is what lets proof strings be
ordered line by line.
"""
from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

from .alphabet import DEFAULT_ALPHABET, DigitMap

NOT, OR, EXISTS, EQ = "¬", "∨", "∃", "="
CONSTANTS = ("0", "1", "c", "v")
VARIABLE = "v"


class GrammarError(ValueError):
    """Raised when a string is not a well-formed formula."""


class Node(NamedTuple):
    kind: str                 # const, app, eq, rel, not, or, exists
    text: str
    children: tuple = ()


class _Parser:
    def __init__(self, text: str):
        self.s = text
        self.i = 0

    def fail(self, what: str):
        raise GrammarError(f"expected {what} at position {self.i} in {self.s!r}")

    def peek(self) -> str | None:
        return self.s[self.i] if self.i < len(self.s) else None

    def eat(self, ch: str):
        if self.peek() != ch:
            self.fail(repr(ch))
        self.i += 1

    def term(self) -> Node:
        start, c = self.i, self.peek()
        if c in CONSTANTS:
            self.i += 1
            return Node("const", c)
        if c == "f":
            self.i += 1
            self.eat("(")
            t = self.term()
            self.eat(")")
            return Node("app", self.s[start:self.i], (t,))
        self.fail("a term")

    def formula(self) -> Node:
        start, c = self.i, self.peek()
        if c == NOT:
            self.i += 1
            f = self.formula()
            return Node("not", self.s[start:self.i], (f,))
        if c == EXISTS:
            self.i += 1
            self.eat(VARIABLE)
            f = self.formula()
            return Node("exists", self.s[start:self.i], (f,))
        if c == "r":
            self.i += 1
            self.eat("(")
            t = self.term()
            self.eat(")")
            return Node("rel", self.s[start:self.i], (t,))
        if c == "(":
            self.i += 1
            nxt = self.peek()
            if nxt in CONSTANTS or nxt == "f":
                left = self.term()
                self.eat(EQ)
                right = self.term()
                self.eat(")")
                return Node("eq", self.s[start:self.i], (left, right))
            left = self.formula()
            self.eat(OR)
            right = self.formula()
            self.eat(")")
            return Node("or", self.s[start:self.i], (left, right))
        self.fail("a formula")


class Grammar:
    """Decision procedure and length-ordered generator for the shipped grammar."""

    def __init__(self, digits: DigitMap | None = None):
        self.digits = digits or DigitMap.canonical(DEFAULT_ALPHABET)
        self._cache_terms: dict[int, tuple[str, ...]] = {}
        self._cache_formulas: dict[int, tuple[str, ...]] = {}

    def parse(self, text: str) -> Node:
        p = _Parser(text)
        try:
            node = p.formula()
        except IndexError:  # pragma: no cover - peek guards indexing
            raise GrammarError(f"unexpected end of {text!r}") from None
        if p.i != len(text):
            raise GrammarError(f"trailing symbols after position {p.i} in {text!r}")
        return node

    def accepts(self, text: str) -> bool:
        try:
            self.parse(text)
        except GrammarError:
            return False
        return True

    def key(self, text: str) -> tuple[int, ...]:
        """Lexicographic sort key on the digit encoding."""
        return tuple(self.digits.digit(ch) for ch in text)

    def terms(self, n: int) -> tuple[str, ...]:
        if n not in self._cache_terms:
            out = list(CONSTANTS) if n == 1 else []
            if n >= 4:
                out += [f"f({t})" for t in self.terms(n - 3)]
            self._cache_terms[n] = tuple(sorted(out, key=self.key))
        return self._cache_terms[n]

    def formulas(self, n: int) -> tuple[str, ...]:
        """All formulas with exactly ``n`` symbols, in digit-lexicographic order."""
        if n not in self._cache_formulas:
            out: list[str] = []
            if n >= 4:
                out += [f"r({t})" for t in self.terms(n - 3)]
            for i in range(1, n - 3):
                j = n - 3 - i
                out += [f"({a}={b})" for a in self.terms(i) for b in self.terms(j)]
                out += [f"({a}{OR}{b})" for a in self.formulas(i) for b in self.formulas(j)]
            if n >= 2:
                out += [NOT + f for f in self.formulas(n - 1)]
            if n >= 3:
                out += [EXISTS + VARIABLE + f for f in self.formulas(n - 2)]
            self._cache_formulas[n] = tuple(sorted(out, key=self.key))
        return self._cache_formulas[n]


SHIPPED_GRAMMAR = Grammar()


def is_formula(text: str) -> bool:
    return SHIPPED_GRAMMAR.accepts(text)


@lru_cache(maxsize=None)
def _digit_key(text: str) -> tuple[int, ...]:
    return SHIPPED_GRAMMAR.key(text)


def formula_key(text: str) -> tuple[int, ...]:
    return _digit_key(text)
