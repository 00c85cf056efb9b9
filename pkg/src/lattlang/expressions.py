"""Finite-support lattice expressions and their word-string decomposition.

An expression assigns a symbol to every integer site; all but finitely many
sites carry the spacer, so only the non-spacer sites are stored.  Maximal
spacer-free runs are the words of the expression, and every expression is an
alternation of spacer strings and words.
"""
from __future__ import annotations

from collections.abc import Mapping
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from .alphabet import DEFAULT_SPACER


class ExpressionError(ValueError):
    pass


class Expression(Mapping):
    """Immutable map site -> non-spacer symbol.

    Iterating yields the support sites in ascending order.  Use
    :meth:`symbol_at` to read any site, including spacer sites.
    """

    __slots__ = ("_items", "_sites", "_hash", "spacer")

    def __init__(self, sites: Mapping[int, str] | Iterable[tuple[int, str]] = (),
                 spacer: str = DEFAULT_SPACER):
        pairs = sites.items() if isinstance(sites, Mapping) else sites
        table: dict[int, str] = {}
        for j, s in pairs:
            if not isinstance(j, int) or isinstance(j, bool):
                raise ExpressionError(f"site index must be an int, got {j!r}")
            if s == spacer:
                table.pop(j, None)
            else:
                table[j] = s
        self._items = tuple(sorted(table.items()))
        self._sites = dict(self._items)
        self._hash = None
        self.spacer = spacer

    # Mapping interface over the support
    def __getitem__(self, j: int) -> str:
        return self._sites[j]

    def __iter__(self):
        return (j for j, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, j) -> bool:
        return j in self._sites

    def __eq__(self, other):
        if isinstance(other, Expression):
            return self._items == other._items and self.spacer == other.spacer
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._items, self.spacer))
        return self._hash

    def __repr__(self):
        return f"Expression({dict(self._items)!r})"

    def __str__(self):
        return to_text(self)

    @property
    def items_sorted(self) -> tuple[tuple[int, str], ...]:
        return self._items

    def symbol_at(self, j: int) -> str:
        return self._sites.get(j, self.spacer)

    def with_symbol(self, j: int, s: str) -> "Expression":
        if self.symbol_at(j) == s:
            return self
        table = dict(self._sites)
        if s == self.spacer:
            del table[j]
        else:
            table[j] = s
        return Expression(table, self.spacer)

    @property
    def min_site(self) -> int | None:
        return self._items[0][0] if self._items else None

    @property
    def max_site(self) -> int | None:
        return self._items[-1][0] if self._items else None

    def restrict(self, a: int, b: int) -> tuple[str, ...]:
        return tuple(self.symbol_at(j) for j in range(a, b + 1))

    def shifted(self, offset: int) -> "Expression":
        return Expression({j + offset: s for j, s in self._items}, self.spacer)


class WordSpan(NamedTuple):
    """A word occupying the closed site interval [start, end]."""

    word: str
    start: int
    end: int


def decompose(e: Expression) -> tuple[WordSpan, ...]:
    """Split an expression into its maximal spacer-free runs, left to right.

    >>> decompose(Expression({1: '0', 2: '1', 4: 'v', 5: 'f'}))
    (WordSpan(word='01', start=1, end=2), WordSpan(word='vf', start=4, end=5))
    """
    words: list[WordSpan] = []
    run: list[str] = []
    start = prev = None
    for j, s in e.items_sorted:
        if prev is not None and j == prev + 1:
            run.append(s)
        else:
            if run:
                words.append(WordSpan("".join(run), start, prev))
            run, start = [s], j
        prev = j
    if run:
        words.append(WordSpan("".join(run), start, prev))
    return tuple(words)


def compose(words: Sequence[tuple[str, int, int]], spacer: str = DEFAULT_SPACER) -> Expression:
    """Inverse of :func:`decompose`.

    Intervals must be ordered with at least one spacer site between
    neighbours, and each word must fill its interval exactly.
    """
    sites: dict[int, str] = {}
    prev_end = None
    for item in words:
        word, a, b = item
        if not word:
            raise ExpressionError("words must be nonempty")
        if b < a or len(word) != b - a + 1:
            raise ExpressionError(f"word {word!r} does not fit interval [{a}, {b}]")
        if spacer in word:
            raise ExpressionError(f"word {word!r} contains the spacer")
        if prev_end is not None and a <= prev_end + 1:
            raise ExpressionError(f"interval [{a}, {b}] overlaps or touches the previous word")
        for offset, s in enumerate(word):
            sites[a + offset] = s
        prev_end = b
    return Expression(sites, spacer)


# -- text form ----------------------------------------------------------------
# "@<first site> <symbols>" with one character per site and a blank for each
# spacer site inside the span, e.g. "@1 01 vf".

def to_text(e: Expression) -> str:
    if not len(e):
        return "@0"
    lo, hi = e.min_site, e.max_site
    body = "".join(" " if e.symbol_at(j) == e.spacer else e.symbol_at(j) for j in range(lo, hi + 1))
    return f"@{lo} {body}"


def from_text(text: str, spacer: str = DEFAULT_SPACER) -> Expression:
    if not text.startswith("@"):
        raise ExpressionError(f"expression text must start with '@': {text!r}")
    head, sep, body = text[1:].partition(" ")
    try:
        lo = int(head)
    except ValueError:
        raise ExpressionError(f"bad site offset in {text!r}") from None
    if not sep:
        if lo != 0:
            raise ExpressionError(f"empty expression must be written '@0', got {text!r}")
        return Expression((), spacer)
    if not body or body[0] == " " or body[-1] == " ":
        raise ExpressionError(f"text body must start and end with a symbol: {text!r}")
    return Expression({lo + i: s for i, s in enumerate(body) if s != " "}, spacer)


def word_at(word: str, start: int = 0, spacer: str = DEFAULT_SPACER) -> Expression:
    return compose([(word, start, start + len(word) - 1)], spacer) if word else Expression((), spacer)


# -- word classification ------------------------------------------------------

class WordClass(Enum):
    WORD = "Word"
    FORMULA = "Formula"


def classify(w: str, grammar=None) -> WordClass:
    """Formula if the grammar accepts ``w``, else plain Word."""
    if grammar is None:
        from .grammar import SHIPPED_GRAMMAR as grammar
    return WordClass.FORMULA if grammar.accepts(w) else WordClass.WORD
