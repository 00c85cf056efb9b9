"""One-step head dynamics on the truncated lattice.

A head with finitely many internal states sits on one lattice site.  In one
step it reads the symbol under it, writes a (possibly superposed) new symbol
at that same site, changes internal state and moves at most one site.  The
rule table gives, for each (internal, symbol) pair, the list of branches
``(amplitude, new_internal, new_symbol, move)``.

Moves that would leave [-L, L] are replaced by a zero move.
"""
from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .alphabet import DEFAULT_ALPHABET, Alphabet
from .expressions import Expression, WordSpan, compose
from .hilbert import (
    BasisLabel,
    IntervalProjector,
    LatticeSpace,
    StateVector,
    blank_label,
    label_key,
    projector_prob,
)

UNITARITY_TOL = 1e-10
DEFAULT_DIM_CAP = 20000
_DROP = 1e-15  # amplitudes below this are treated as exact cancellation


class UnitarityError(ValueError):
    pass


class DimensionCapExceeded(RuntimeError):
    pass


class RuleRow(NamedTuple):
    internal: int
    symbol: str
    amplitude: complex
    new_internal: int
    new_symbol: str
    move: int


class StepOperator:
    """Validated one-step unitary U_M(1).  Treat as immutable."""

    def __init__(self, space: LatticeSpace, rows: Iterable[RuleRow], name: str = "step"):
        self.space = space
        self.name = name
        table: dict[tuple[int, str], list[tuple[complex, int, str, int]]] = defaultdict(list)
        by_output: dict[int, list[RuleRow]] = defaultdict(list)
        self.rows: tuple[RuleRow, ...] = tuple(RuleRow(*r) for r in rows)
        for r in self.rows:
            if r.move not in (-1, 0, 1):
                raise UnitarityError(f"move must be -1, 0 or +1 in {r}")
            for i in (r.internal, r.new_internal):
                if not 0 <= i < space.n_internal:
                    raise UnitarityError(f"internal state {i} out of range in {r}")
            for s in (r.symbol, r.new_symbol):
                if s not in space.alphabet:
                    raise UnitarityError(f"symbol {s!r} not in alphabet in {r}")
            if r.amplitude != 0:
                table[(r.internal, r.symbol)].append((complex(r.amplitude), r.new_internal, r.new_symbol, r.move))
                by_output[r.new_internal].append(r)
        missing = [(i, s) for i in range(space.n_internal) for s in space.alphabet
                   if (i, s) not in table]
        if missing:
            raise UnitarityError(f"rule is not total; no branches for {missing[:5]}"
                                 + (" ..." if len(missing) > 5 else ""))
        self._table = dict(table)
        self._by_output = dict(by_output)
        self._images: dict[BasisLabel, dict[BasisLabel, complex]] = {}
        self.validated_depth: int | None = None
        self.validated_dim: int | None = None

    def branches(self, internal: int, symbol: str):
        return self._table[(internal, symbol)]

    def _target_site(self, x: int, move: int) -> int:
        y = x + move
        return y if self.space.contains_site(y) else x

    def image(self, label: BasisLabel) -> dict[BasisLabel, complex]:
        """U applied to one basis state."""
        out = self._images.get(label)
        if out is None:
            i, x, cfg = label
            out = {}
            for amp, j, s, move in self._table[(i, cfg.symbol_at(x))]:
                b = BasisLabel(j, self._target_site(x, move), cfg.with_symbol(x, s))
                out[b] = out.get(b, 0j) + amp
            self._images[label] = out
        return out

    def apply(self, psi: StateVector) -> StateVector:
        acc: dict[BasisLabel, complex] = defaultdict(complex)
        for label, amp in psi.items():
            for b, u in self.image(label).items():
                acc[b] += u * amp
        return StateVector._trusted(psi.space, {b: a for b, a in acc.items() if abs(a) > _DROP})

    def preimages(self, label: BasisLabel) -> set[BasisLabel]:
        """Every basis state whose image has ``label`` in its support."""
        j, y, cfg = label
        L = self.space.bound
        found = set()
        for r in self._by_output.get(j, ()):
            xs = [y - r.move] if self.space.contains_site(y - r.move) else []
            if (r.move == 1 and y == L) or (r.move == -1 and y == -L):
                xs.append(y)
            for x in xs:
                if cfg.symbol_at(x) != r.new_symbol:
                    continue
                cand = BasisLabel(r.internal, x, cfg.with_symbol(x, r.symbol))
                if label in self.image(cand):
                    found.add(cand)
        return found

    def apply_adjoint(self, psi: StateVector) -> StateVector:
        acc: dict[BasisLabel, complex] = defaultdict(complex)
        for label, amp in psi.items():
            for cand in self.preimages(label):
                acc[cand] += self.image(cand)[label].conjugate() * amp
        return StateVector._trusted(psi.space, {b: a for b, a in acc.items() if abs(a) > _DROP})

    def __repr__(self):
        return f"StepOperator({self.name!r}, {len(self.rows)} rows)"


def reachable_levels(U: StepOperator, start: Iterable[BasisLabel], depth: int | None,
                     dim_cap: int = DEFAULT_DIM_CAP) -> list[list[BasisLabel]]:
    """Breadth-first levels of labels reachable from ``start``.

    Level d holds labels first reached after d steps; ``depth`` levels are
    returned (all of them when ``depth`` is None and the set saturates).
    """
    seen = set()
    level = []
    for b in sorted(set(start), key=label_key):
        seen.add(b)
        level.append(b)
    levels = []
    while level and (depth is None or len(levels) < depth):
        levels.append(level)
        nxt = set()
        for b in level:
            for c in U.image(b):
                if c not in seen:
                    seen.add(c)
                    nxt.add(c)
        if len(seen) > dim_cap:
            raise DimensionCapExceeded(f"reachable basis exceeds the dimension cap of {dim_cap}")
        level = sorted(nxt, key=label_key)
    return levels


def isometry_defects(U: StepOperator, labels: Sequence[BasisLabel], tol: float = UNITARITY_TOL):
    """Pairs of columns of U (restricted to ``labels``) that are not orthonormal."""
    index: dict[BasisLabel, int] = {}
    rows, cols, vals = [], [], []
    for c, b in enumerate(labels):
        for out, amp in U.image(b).items():
            rows.append(index.setdefault(out, len(index)))
            cols.append(c)
            vals.append(amp)
    M = sp.csc_matrix((vals, (rows, cols)), shape=(len(index), len(labels)), dtype=complex)
    G = (M.conj().T @ M - sp.identity(len(labels), dtype=complex, format="csc")).tocoo()
    bad = [(int(r), int(c)) for r, c, v in zip(G.row, G.col, G.data) if abs(v) > tol and r <= c]
    return [(labels[r], labels[c]) for r, c in bad]


def validate(U: StepOperator, start: Iterable[BasisLabel] | None = None, depth: int | None = None,
             dim_cap: int = DEFAULT_DIM_CAP) -> StepOperator:
    """Check orthonormal columns on the basis reachable from ``start``."""
    if start is None:
        start = [blank_label()]
    levels = reachable_levels(U, start, depth, dim_cap)
    labels = [b for lv in levels for b in lv]
    defects = isometry_defects(U, labels)
    if defects:
        keys = sorted({(b.internal, b.config.symbol_at(b.position)) for pair in defects for b in pair})
        offending = [r for r in U.rows if (r.internal, r.symbol) in keys]
        raise UnitarityError(
            f"{len(defects)} non-orthonormal column pair(s) on the reachable basis; "
            f"offending rule rows: {offending[:8]}" + (" ..." if len(offending) > 8 else ""))
    U.validated_depth = len(levels)
    U.validated_dim = len(labels)
    return U


def build_step(rows: Iterable[RuleRow], space: LatticeSpace | None = None, *,
               start: Iterable[BasisLabel] | None = None, depth: int | None = None,
               dim_cap: int = DEFAULT_DIM_CAP, name: str = "step") -> StepOperator:
    """Construct and validate a step operator from rule rows."""
    U = StepOperator(space or LatticeSpace(), rows, name)
    return validate(U, start, depth, dim_cap)


# -- rule families -------------------------------------------------------------

def identity_rows(space: LatticeSpace) -> list[RuleRow]:
    return [RuleRow(i, s, 1.0, i, s, 0) for i in range(space.n_internal) for s in space.alphabet]


def _as_target(target, spacer: str) -> Expression:
    if isinstance(target, Expression):
        return target
    if isinstance(target, str):
        return compose([WordSpan(target, 0, len(target) - 1)], spacer) if target else Expression((), spacer)
    return compose(list(target), spacer)


def build_writer(target, bound: int = 12, alphabet: Alphabet = DEFAULT_ALPHABET,
                 depth: int | None = None) -> StepOperator:
    """Deterministic sweep writer for a target expression.

    The head starts at site 0 in internal state 0.  Internal state j writes
    the target symbol for site j and steps right; after the last target site
    the head enters the terminal state n, which never changes a symbol and
    keeps stepping right.  ``target`` is an Expression, a word placed at
    site 0, or a list of (word, start, end) spans.

    On the finite lattice the terminal walk is stopped by the edge at +L,
    where two path states would share an image, so validation covers the
    first ``depth`` steps (default L).
    """
    tgt = _as_target(target, alphabet.spacer)
    if len(tgt) and (tgt.min_site < 0 or tgt.max_site > bound):
        raise UnitarityError(f"target span [{tgt.min_site}, {tgt.max_site}] does not fit in [0, {bound}]")
    n = tgt.max_site + 1 if len(tgt) else 0
    space = LatticeSpace(n_internal=n + 1, bound=bound, alphabet=alphabet)
    spacer = alphabet.spacer
    rows = []
    for j in range(n):
        for s in alphabet:
            if s == spacer:
                rows.append(RuleRow(j, s, 1.0, j + 1, tgt.symbol_at(j), 1))
            else:
                rows.append(RuleRow(j, s, 1.0, j, s, 0))
    rows += [RuleRow(n, s, 1.0, n, s, 1) for s in alphabet]
    U = StepOperator(space, rows, name=f"writer[{n}]")
    return validate(U, [blank_label()], bound if depth is None else depth)


def build_counter(n: int, bound: int | None = None, alphabet: Alphabet = DEFAULT_ALPHABET,
                  depth: int | None = None) -> StepOperator:
    """Synthetic revisiting dynamics: an n-bit binary counter on sites 0..n-1.

    The head increments a little-endian counter, returning to site 0 after
    every increment, and only leaves once the counter overflows back to all
    zeros.  Low sites are rewritten over and over, so the window in which
    sites 0..n-1 settle grows like 2^n.  Used as an inefficient control.
    """
    if n < 1:
        raise ValueError("counter needs at least one bit")
    for s in ("0", "1"):
        alphabet.check(s)
    bound = 4 * n + 8 if bound is None else bound
    INC, RET, TERM = 0, n, 2 * n
    space = LatticeSpace(n_internal=2 * n + 1, bound=bound, alphabet=alphabet)
    rows = []
    for j in range(n):
        for s in alphabet:
            if s == "1":
                rows.append(RuleRow(INC + j, s, 1.0, INC + j + 1 if j < n - 1 else TERM, "0", 1))
            elif s in ("0", alphabet.spacer):
                if j == 0:
                    rows.append(RuleRow(INC, s, 1.0, INC, "1", 0))
                else:
                    rows.append(RuleRow(INC + j, s, 1.0, RET + j - 1, "1", -1))
            else:
                rows.append(RuleRow(INC + j, s, 1.0, INC + j, s, 0))
            if j == 0:
                rows.append(RuleRow(RET, s, 1.0, INC, s, 0))
            else:
                rows.append(RuleRow(RET + j, s, 1.0, RET + j - 1, s, -1))
    rows += [RuleRow(TERM, s, 1.0, TERM, s, 1) for s in alphabet]
    U = StepOperator(space, rows, name=f"counter[{n}]")
    if depth is None:
        depth = counter_overflow_time(n) + 1
    return validate(U, [blank_label()], depth)


def counter_overflow_time(n: int) -> int:
    """Step at which the counter of :func:`build_counter` has overflowed."""
    t = 0
    bits = [0] * n
    while True:
        # one increment, starting from INC_0 at site 0
        j = 0
        while bits[j] == 1:
            bits[j] = 0
            t += 1
            j += 1
            if j == n:
                return t
        bits[j] = 1
        t += 1
        t += j  # RET walk from j-1 down to 0 plus the hand-back to INC_0


def random_local_step(space: LatticeSpace, rng: np.random.Generator,
                      start: Iterable[BasisLabel] | None = None, dim_cap: int = DEFAULT_DIM_CAP,
                      name: str = "random-local") -> StepOperator:
    """Haar-random unitary on (internal, symbol at head); the head stays put."""
    from scipy.stats import unitary_group

    pairs = [(i, s) for i in range(space.n_internal) for s in space.alphabet]
    V = unitary_group.rvs(len(pairs), random_state=rng)
    rows = [RuleRow(i, s, V[r, c], j, t, 0)
            for c, (i, s) in enumerate(pairs) for r, (j, t) in enumerate(pairs)]
    return build_step(rows, space, start=start, dim_cap=dim_cap, name=name)


def random_sweep_step(width: int, rng: np.random.Generator, bound: int = 12,
                      mixed: Sequence[str] = ("#", "0", "1"), alphabet: Alphabet = DEFAULT_ALPHABET,
                      depth: int | None = None, dim_cap: int = DEFAULT_DIM_CAP) -> StepOperator:
    """Sweeping head that applies a Haar-random unitary to the symbols in
    ``mixed`` at each of sites 0..width-1, then walks right like the writer.

    Other symbols pass through unchanged.  The configuration on [0, width-1]
    ends in a superposition, so projector traces are nontrivial.  Validation
    covers ``depth`` steps (default ``bound``) for the same edge reason as
    :func:`build_writer`.
    """
    from scipy.stats import unitary_group

    if not 1 <= width <= bound:
        raise ValueError(f"width must lie in 1..{bound}")
    mixed = [alphabet.check(s) for s in mixed]
    space = LatticeSpace(n_internal=width + 1, bound=bound, alphabet=alphabet)
    rows = []
    for j in range(width):
        W = unitary_group.rvs(len(mixed), random_state=rng)
        for c, s in enumerate(mixed):
            rows += [RuleRow(j, s, W[r, c], j + 1, t, 1) for r, t in enumerate(mixed)]
        rows += [RuleRow(j, s, 1.0, j + 1, s, 1) for s in alphabet if s not in mixed]
    rows += [RuleRow(width, s, 1.0, width, s, 1) for s in alphabet]
    U = StepOperator(space, rows, name=f"sweep[{width}]")
    return validate(U, [blank_label()], bound if depth is None else depth, dim_cap)


# -- evolution -----------------------------------------------------------------

@dataclass(frozen=True)
class Trace:
    """Probability series p(t) for t = 0..T."""

    series: tuple[tuple[int, float], ...]

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "Trace":
        return cls(tuple((t, float(p)) for t, p in enumerate(values)))

    @property
    def values(self) -> list[float]:
        return [p for _, p in self.series]

    @property
    def horizon(self) -> int:
        return self.series[-1][0]

    def __len__(self):
        return len(self.series)


def evolve(psi0: StateVector, U: StepOperator, t: int, dim_cap: int = DEFAULT_DIM_CAP) -> StateVector:
    if t < 0:
        raise ValueError("step count must be nonnegative")
    psi = psi0
    for _ in range(t):
        psi = U.apply(psi)
        if len(psi) > dim_cap:
            raise DimensionCapExceeded(f"state support exceeds the dimension cap of {dim_cap}")
    return psi


def probability_trace(psi0: StateVector, U: StepOperator, p: IntervalProjector, T: int,
                      dim_cap: int = DEFAULT_DIM_CAP) -> Trace:
    """p(t) = <psi0| U^-t P U^t |psi0> computed on the evolving state."""
    values = []
    psi = psi0
    for t in range(T + 1):
        if t:
            psi = U.apply(psi)
            if len(psi) > dim_cap:
                raise DimensionCapExceeded(f"state support exceeds the dimension cap of {dim_cap}")
        values.append(projector_prob(psi, p))
    return Trace.from_values(values)


def truncated_matrix(U: StepOperator, start: Iterable[BasisLabel], steps: int,
                     dim_cap: int = DEFAULT_DIM_CAP):
    """Explicit sparse matrix of U on the labels reachable within ``steps``."""
    levels = reachable_levels(U, start, steps + 1, dim_cap)
    labels = [b for lv in levels for b in lv]
    index = {b: i for i, b in enumerate(labels)}
    rows, cols, vals = [], [], []
    for c, b in enumerate(labels):
        for out, amp in U.image(b).items():
            r = index.get(out)
            if r is not None:
                rows.append(r)
                cols.append(c)
                vals.append(amp)
    n = len(labels)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=complex), labels


def heisenberg_trace(psi0: StateVector, U: StepOperator, p: IntervalProjector, T: int,
                     dim_cap: int = DEFAULT_DIM_CAP) -> Trace:
    """Same series as :func:`probability_trace`, via P(t) = U^dag P(t-1) U."""
    M, labels = truncated_matrix(U, list(psi0), T, dim_cap)
    vec = np.array([psi0[b] for b in labels], dtype=complex)
    P = sp.diags([1.0 if p.matches(b.config) else 0.0 for b in labels]).astype(complex).tocsr()
    Mh = M.conj().T.tocsr()
    values = []
    Pt = P
    for t in range(T + 1):
        if t:
            Pt = (Mh @ Pt @ M).tocsr()
        values.append(float(np.vdot(vec, Pt @ vec).real))
    return Trace.from_values(values)


# -- documents -----------------------------------------------------------------

def dumps_trace(trace: Trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "p"])
    for t, p in trace.series:
        w.writerow([t, repr(p)])
    return buf.getvalue()


def rule_document(U: StepOperator) -> dict:
    return {
        "n_internal": U.space.n_internal,
        "bound": U.space.bound,
        "symbols": list(U.space.alphabet.symbols),
        "spacer": U.space.alphabet.spacer,
        "rows": [
            {"internal": r.internal, "symbol": r.symbol,
             "amplitude_re": complex(r.amplitude).real, "amplitude_im": complex(r.amplitude).imag,
             "new_internal": r.new_internal, "new_symbol": r.new_symbol, "move": r.move}
            for r in U.rows
        ],
    }


def rows_from_document(doc: Mapping) -> tuple[LatticeSpace, list[RuleRow]]:
    alphabet = Alphabet(tuple(doc.get("symbols", DEFAULT_ALPHABET.symbols)),
                        doc.get("spacer", DEFAULT_ALPHABET.spacer))
    space = LatticeSpace(int(doc["n_internal"]), int(doc.get("bound", 12)), alphabet)
    rows = [RuleRow(int(r["internal"]), r["symbol"],
                    complex(r.get("amplitude_re", 0.0), r.get("amplitude_im", 0.0)),
                    int(r["new_internal"]), r["new_symbol"], int(r["move"]))
            for r in doc["rows"]]
    return space, rows


def loads_rules(text: str, **kwargs) -> StepOperator:
    space, rows = rows_from_document(json.loads(text))
    return build_step(rows, space, **kwargs)
