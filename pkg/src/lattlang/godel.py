"""Quine-style Goedel map between expressions and k-ary numerals.

The symbol at site j becomes the digit d(s) in the k^j place, so sites with
j < 0 sit to the right of the k-al point and the value is an exact
nonnegative rational.
"""
from __future__ import annotations

import string
from fractions import Fraction
from typing import Mapping

from .alphabet import DEFAULT_ALPHABET, AlphabetError, DigitMap
from .expressions import Expression

_DIGIT_CHARS = string.digits + string.ascii_lowercase


class NumeralError(ValueError):
    pass


class Numeral:
    """Explicit per-site digits in base k; the scalar value is derived."""

    __slots__ = ("k", "_digits")

    def __init__(self, digits: Mapping[int, int], k: int):
        if k < 2:
            raise NumeralError("base must be at least 2")
        for j, dgt in digits.items():
            if not 0 <= dgt < k:
                raise NumeralError(f"digit {dgt} at site {j} outside 0..{k - 1}")
        self.k = k
        self._digits = dict(sorted(digits.items()))

    @property
    def digits(self) -> dict[int, int]:
        return dict(self._digits)

    @property
    def value(self) -> Fraction:
        return sum((Fraction(self.k) ** j * dgt for j, dgt in self._digits.items()), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, Numeral) and (self.k, self._digits) == (other.k, other._digits)

    def __hash__(self):
        return hash((self.k, tuple(self._digits.items())))

    def __repr__(self):
        return f"Numeral({self._digits!r}, k={self.k})"

    def __str__(self):
        return to_text(self)


def site_value(s: str, j: int, k: int, d: DigitMap) -> Fraction:
    """d(s)·k^j, exactly."""
    return d.digit(s) * Fraction(k) ** j


def encode(e: Expression, d: DigitMap | None = None, k: int | None = None,
           span: tuple[int, int] | None = None) -> Numeral:
    """Digits for every site of ``span`` (default: the smallest interval
    covering the support); spacer sites inside the span get d(spacer)."""
    d = d or DigitMap.canonical(DEFAULT_ALPHABET)
    k = d.k if k is None else k
    if k < d.k:
        raise NumeralError(f"base {k} cannot hold {d.k} digits")
    if span is None:
        if not len(e):
            return Numeral({}, k)
        span = (e.min_site, e.max_site)
    a, b = span
    if len(e) and (e.min_site < a or e.max_site > b):
        raise NumeralError(f"span [{a}, {b}] does not cover the support")
    return Numeral({j: d.digit(e.symbol_at(j)) for j in range(a, b + 1)}, k)


def decode(n: Numeral, d: DigitMap | None = None, spacer: str = DEFAULT_ALPHABET.spacer) -> Expression:
    d = d or DigitMap.canonical(DEFAULT_ALPHABET)
    try:
        return Expression({j: d.symbol(dgt) for j, dgt in n.digits.items()}, spacer)
    except AlphabetError as exc:
        raise NumeralError(str(exc)) from None


def godel_number(e: Expression, d: DigitMap | None = None, k: int | None = None) -> Fraction:
    """Scalar value only.  Not injective: a top digit 0 is invisible."""
    return encode(e, d, k).value


# -- text form: "k13@0:10." ---------------------------------------------------
# base, lowest site, then digits from the highest site down; the k-al point
# is written between sites 0 and -1 whenever the span reaches either of them.

def to_text(n: Numeral) -> str:
    if n.k > len(_DIGIT_CHARS):
        raise NumeralError(f"text form supports bases up to {len(_DIGIT_CHARS)}")
    digits = n.digits
    if not digits:
        return f"k{n.k}@0:"
    lo, hi = min(digits), max(digits)
    if len(digits) != hi - lo + 1:
        raise NumeralError("text form needs contiguous digits")
    body = []
    for j in range(hi, lo - 1, -1):
        if j == -1 and hi >= -1:
            body.append(".")
        body.append(_DIGIT_CHARS[digits[j]])
    if lo == 0:
        body.append(".")
    return f"k{n.k}@{lo}:{''.join(body)}"


def from_text(text: str) -> Numeral:
    try:
        head, body = text.split(":", 1)
        base, lo = head[1:].split("@")
        k, lo = int(base), int(lo)
    except ValueError:
        raise NumeralError(f"malformed numeral text {text!r}") from None
    if not head.startswith("k"):
        raise NumeralError(f"numeral text must start with 'k': {text!r}")
    raw = body.replace(".", "")
    if not raw:
        return Numeral({}, k)
    hi = lo + len(raw) - 1
    try:
        digits = {hi - i: _DIGIT_CHARS.index(ch) for i, ch in enumerate(raw)}
    except ValueError:
        raise NumeralError(f"bad digit in {text!r}") from None
    out = Numeral(digits, k)
    if to_text(out) != text:
        raise NumeralError(f"k-al point misplaced in {text!r}")
    return out
