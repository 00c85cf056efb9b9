"""Sparse pure states over (head internal state, head site, expression) labels."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from .alphabet import DEFAULT_ALPHABET, Alphabet
from .expressions import Expression, to_text

NORM_TOL = 1e-10


class StateError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeSpace:
    """Truncated lattice [-bound, bound] with an ``n_internal``-state head."""

    n_internal: int = 1
    bound: int = 12
    alphabet: Alphabet = DEFAULT_ALPHABET

    def __post_init__(self):
        if self.n_internal < 1:
            raise StateError("head needs at least one internal state")
        if self.bound < 0:
            raise StateError("lattice bound must be nonnegative")

    def contains_site(self, j: int) -> bool:
        return -self.bound <= j <= self.bound

    def check_label(self, label: "BasisLabel") -> "BasisLabel":
        if not 0 <= label.internal < self.n_internal:
            raise StateError(f"internal state {label.internal} outside 0..{self.n_internal - 1}")
        if not self.contains_site(label.position):
            raise StateError(f"head position {label.position} outside [-{self.bound}, {self.bound}]")
        cfg = label.config
        if len(cfg) and not (self.contains_site(cfg.min_site) and self.contains_site(cfg.max_site)):
            raise StateError(f"configuration {to_text(cfg)!r} leaves the lattice")
        for j in cfg:
            if cfg[j] not in self.alphabet:
                raise StateError(f"symbol {cfg[j]!r} at site {j} is not in the alphabet")
        return label


class BasisLabel(NamedTuple):
    internal: int
    position: int
    config: Expression


def label_key(label: BasisLabel):
    """Canonical order: internal state, head site, then sorted site list."""
    return (label.internal, label.position, label.config.items_sorted)


def blank_label(internal: int = 0, position: int = 0) -> BasisLabel:
    return BasisLabel(internal, position, Expression())


class StateVector:
    """Immutable finite-support map from basis labels to complex amplitudes."""

    __slots__ = ("space", "_amps")

    def __init__(self, space: LatticeSpace, amplitudes: Mapping[BasisLabel, complex]):
        self.space = space
        self._amps = {space.check_label(b): complex(a) for b, a in amplitudes.items() if a != 0}

    @classmethod
    def _trusted(cls, space, amps: dict) -> "StateVector":
        obj = cls.__new__(cls)
        obj.space = space
        obj._amps = amps
        return obj

    @classmethod
    def basis(cls, space: LatticeSpace, label: BasisLabel) -> "StateVector":
        return cls(space, {label: 1.0})

    def __getitem__(self, label: BasisLabel) -> complex:
        return self._amps.get(label, 0j)

    def __iter__(self):
        return iter(self._amps)

    def __len__(self):
        return len(self._amps)

    def items(self):
        return self._amps.items()

    def sorted_items(self) -> list[tuple[BasisLabel, complex]]:
        return sorted(self._amps.items(), key=lambda kv: label_key(kv[0]))

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._amps.values()))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(sum(abs(a) ** 2 for a in self._amps.values()) - 1.0) <= tol

    def scaled(self, factor: complex) -> "StateVector":
        return StateVector._trusted(self.space, {b: a * factor for b, a in self._amps.items()})

    def __repr__(self):
        return f"StateVector({len(self._amps)} labels, norm={self.norm():.12g})"


def superpose(terms: Iterable[tuple[BasisLabel, complex]], space: LatticeSpace) -> StateVector:
    """Normalized sum of weighted basis states; repeated labels add up."""
    acc: dict[BasisLabel, complex] = {}
    for label, amp in terms:
        acc[label] = acc.get(label, 0j) + complex(amp)
    acc = {b: a for b, a in acc.items() if a != 0}
    total = math.sqrt(sum(abs(a) ** 2 for a in acc.values()))
    if total == 0.0:
        raise StateError("amplitudes cancel to the zero vector; nothing to normalize")
    return StateVector(space, {b: a / total for b, a in acc.items()})


def _check_same_space(psi: StateVector, phi: StateVector):
    a, b = psi.space, phi.space
    if (a.n_internal, a.bound, a.alphabet) != (b.n_internal, b.bound, b.alphabet):
        raise StateError("states live in different lattice spaces")


def inner_product(psi: StateVector, phi: StateVector) -> complex:
    """<psi|phi>, conjugate-linear in ``psi``."""
    _check_same_space(psi, phi)
    if len(psi) > len(phi):
        return sum((psi[b].conjugate() * a for b, a in phi.items()), 0j)
    return sum((a.conjugate() * phi[b] for b, a in psi.items()), 0j)


@dataclass(frozen=True)
class IntervalProjector:
    """Projector onto the product state assigning ``symbols`` to sites a..b."""

    a: int
    b: int
    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if self.a > self.b:
            raise StateError(f"empty interval [{self.a}, {self.b}]")
        if len(self.symbols) != self.b - self.a + 1:
            raise StateError("assignment length does not match the interval")

    @classmethod
    def for_word(cls, word: Sequence[str], start: int = 0) -> "IntervalProjector":
        return cls(start, start + len(word) - 1, tuple(word))

    def matches(self, config: Expression) -> bool:
        return all(config.symbol_at(self.a + i) == s for i, s in enumerate(self.symbols))

    def check_space(self, space: LatticeSpace):
        if not (space.contains_site(self.a) and space.contains_site(self.b)):
            raise StateError(f"projector interval [{self.a}, {self.b}] leaves the lattice")


def projector_prob(psi: StateVector, p: IntervalProjector) -> float:
    p.check_space(psi.space)
    return float(sum(abs(a) ** 2 for b, a in psi.items() if p.matches(b.config)))


def restricted_distribution(psi: StateVector, a: int, b: int) -> dict[tuple[str, ...], float]:
    """Probability of every assignment on [a, b] that has nonzero weight."""
    out: dict[tuple[str, ...], float] = {}
    for label, amp in psi.items():
        key = label.config.restrict(a, b)
        out[key] = out.get(key, 0.0) + abs(amp) ** 2
    return out


def dumps_state(psi: StateVector) -> str:
    """CSV with columns internal,position,config_text,re,im in canonical order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["internal", "position", "config_text", "re", "im"])
    for label, amp in psi.sorted_items():
        w.writerow([label.internal, label.position, to_text(label.config), repr(amp.real), repr(amp.imag)])
    return buf.getvalue()


def loads_state(text: str, space: LatticeSpace) -> StateVector:
    from .expressions import from_text

    rows = csv.DictReader(io.StringIO(text))
    amps = {}
    for row in rows:
        label = BasisLabel(int(row["internal"]), int(row["position"]),
                           from_text(row["config_text"], space.alphabet.spacer))
        amps[label] = complex(float(row["re"]), float(row["im"]))
    return StateVector(space, amps)
