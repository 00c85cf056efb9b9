"""Symbol alphabets, spin-projection interpretation maps and digit maps.

A lattice site carries a qukit whose basis states stand for the symbols of
an alphabet.  In the spin model each symbol is identified with one spin
projection eigenstate through an injective map; for numeral readings each
symbol is identified with a digit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

DEFAULT_SYMBOLS: tuple[str, ...] = (
    "0", "1", "c", "v", "f", "r", "=", "∨", "∃", "¬", "(", ")", "#",
)
DEFAULT_SPACER = "#"


class AlphabetError(ValueError):
    """A symbol, digit or projection does not belong to the alphabet."""


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...] = DEFAULT_SYMBOLS
    spacer: str = DEFAULT_SPACER

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if len(symbols) < 2:
            raise AlphabetError("an alphabet needs at least two symbols")
        if len(set(symbols)) != len(symbols):
            raise AlphabetError(f"duplicate symbols in {symbols!r}")
        for s in symbols:
            # text forms use one character per site and blanks as spacers
            if not isinstance(s, str) or len(s) != 1 or s.isspace() or s == "@":
                raise AlphabetError(f"symbol tokens must be single non-blank characters, got {s!r}")
        if self.spacer not in symbols:
            raise AlphabetError(f"spacer {self.spacer!r} is not one of the symbols")

    @property
    def k(self) -> int:
        return len(self.symbols)

    def __contains__(self, s: object) -> bool:
        return s in self.symbols

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def check(self, s: str) -> str:
        if s not in self.symbols:
            raise AlphabetError(f"symbol {s!r} is not in the alphabet")
        return s


DEFAULT_ALPHABET = Alphabet()


def min_spin(k: int) -> Fraction:
    """Smallest spin magnitude whose 2σ+1 projections can label k symbols.

    >>> min_spin(13)
    Fraction(6, 1)
    >>> min_spin(2)
    Fraction(1, 2)
    """
    if k < 1:
        raise ValueError(f"symbol count must be positive, got {k}")
    return Fraction(k - 1, 2)


def _as_half_integer(value) -> Fraction:
    q = Fraction(value)
    if q.denominator not in (1, 2):
        raise AlphabetError(f"{value!r} is not a half-integer")
    return q


@dataclass(frozen=True)
class InterpretationMap:
    """Injective map from symbols to spin projections m, −σ ≤ m ≤ σ."""

    sigma: Fraction
    assignment: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        sigma = _as_half_integer(self.sigma)
        if sigma < 0:
            raise AlphabetError(f"spin magnitude must be nonnegative, got {sigma}")
        assignment = {s: _as_half_integer(m) for s, m in dict(self.assignment).items()}
        for s, m in assignment.items():
            if abs(m) > sigma or (m + sigma).denominator != 1:
                raise AlphabetError(f"projection {m} for {s!r} is not an eigenvalue for spin {sigma}")
        if len(set(assignment.values())) != len(assignment):
            raise AlphabetError("interpretation map is not one-one")
        if 2 * sigma + 1 < len(assignment):
            raise AlphabetError(f"spin {sigma} has too few projections for {len(assignment)} symbols")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "assignment", assignment)

    @classmethod
    def default(cls, alphabet: Alphabet = DEFAULT_ALPHABET, sigma=None) -> "InterpretationMap":
        """Assign −σ, −σ+1, … to the symbols in alphabet order."""
        sigma = min_spin(alphabet.k) if sigma is None else _as_half_integer(sigma)
        return cls(sigma, {s: -sigma + i for i, s in enumerate(alphabet.symbols)})

    @property
    def projections(self) -> list[Fraction]:
        """All 2σ+1 eigenvalues, ascending."""
        return [-self.sigma + i for i in range(int(2 * self.sigma) + 1)]


def interpret_symbol(s: str, interp: InterpretationMap) -> Fraction:
    try:
        return interp.assignment[s]
    except KeyError:
        raise AlphabetError(f"symbol {s!r} has no spin projection under this map") from None


class DigitMap:
    """Bijection between the k symbols and the digits 0..k-1."""

    __slots__ = ("_order", "_digit")

    def __init__(self, order: Iterable[str]):
        order = tuple(order)
        if len(set(order)) != len(order):
            raise AlphabetError("digit order repeats a symbol")
        self._order = order
        self._digit = {s: i for i, s in enumerate(order)}

    @classmethod
    def canonical(cls, alphabet: Alphabet = DEFAULT_ALPHABET) -> "DigitMap":
        return cls(alphabet.symbols)

    @property
    def order(self) -> tuple[str, ...]:
        return self._order

    @property
    def k(self) -> int:
        return len(self._order)

    def digit(self, s: str) -> int:
        try:
            return self._digit[s]
        except KeyError:
            raise AlphabetError(f"symbol {s!r} has no digit") from None

    def symbol(self, digit: int) -> str:
        if not 0 <= digit < len(self._order):
            raise AlphabetError(f"digit {digit} outside 0..{len(self._order) - 1}")
        return self._order[digit]

    def __eq__(self, other):
        return isinstance(other, DigitMap) and other._order == self._order

    def __hash__(self):
        return hash(self._order)

    def __repr__(self):
        return f"DigitMap({''.join(self._order)!r})"


def digit_of(s: str, d: DigitMap) -> int:
    return d.digit(s)


def symbol_of(digit: int, d: DigitMap) -> str:
    return d.symbol(digit)


# -- configuration documents -------------------------------------------------

def to_config(alphabet: Alphabet, interp: InterpretationMap | None = None,
              digits: DigitMap | None = None) -> dict:
    interp = interp or InterpretationMap.default(alphabet)
    digits = digits or DigitMap.canonical(alphabet)
    return {
        "symbols": list(alphabet.symbols),
        "spacer": alphabet.spacer,
        "sigma": float(interp.sigma),
        "projections": {s: float(m) for s, m in interp.assignment.items()},
        "digit_order": list(digits.order),
    }


def from_config(doc: Mapping) -> tuple[Alphabet, InterpretationMap, DigitMap]:
    alphabet = Alphabet(tuple(doc["symbols"]), doc.get("spacer", DEFAULT_SPACER))
    sigma = doc.get("sigma")
    if "projections" in doc:
        interp = InterpretationMap(Fraction(sigma).limit_denominator(2),
                                   {s: Fraction(m).limit_denominator(2)
                                    for s, m in doc["projections"].items()})
    else:
        interp = InterpretationMap.default(alphabet, None if sigma is None
                                           else Fraction(sigma).limit_denominator(2))
    if set(interp.assignment) != set(alphabet.symbols):
        raise AlphabetError("interpretation map does not cover the alphabet")
    digits = DigitMap(doc.get("digit_order", alphabet.symbols))
    if set(digits.order) != set(alphabet.symbols):
        raise AlphabetError("digit order is not a permutation of the alphabet")
    return alphabet, interp, digits


def dumps_config(alphabet: Alphabet, interp=None, digits=None) -> str:
    return json.dumps(to_config(alphabet, interp, digits), ensure_ascii=False, indent=2)


def loads_config(text: str):
    return from_config(json.loads(text))
