"""Toy axiomatizable theories over the shipped grammar.

Deduction is a Hilbert-style propositional core.  The alphabet has no
arrow, so A→B is written (¬A∨B).  The logical axioms are every instance of

    K      A→(B→A)
    S      (A→(B→C))→((A→B)→(A→C))
    CONTRA (¬A→¬B)→(B→A)

and the only rule is modus ponens.  For the propositional core any formula
that is not a negation or a disjunction (equations, r(t), ∃v…) is an atom.
A theory's language is a finite set of such atoms; proof lines must be
built from them.
"""
from __future__ import annotations

import heapq
import itertools
import math
import random
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .alphabet import DEFAULT_ALPHABET
from .grammar import NOT, OR, SHIPPED_GRAMMAR, GrammarError, Node, formula_key

DEFAULT_ATOMS: tuple[str, ...] = ("(0=0)", "(0=1)", "(1=1)")
SYMBOL_BITS = math.ceil(math.log2(DEFAULT_ALPHABET.k))
FIELD_BITS = 16


# -- formula helpers ------------------------------------------------------------

def neg(a: str) -> str:
    return NOT + a


def disj(a: str, b: str) -> str:
    return f"({a}{OR}{b})"


def imp(a: str, b: str) -> str:
    return disj(neg(a), b)


@lru_cache(maxsize=200_000)
def parse(f: str) -> Node:
    return SHIPPED_GRAMMAR.parse(f)


def as_negation(f: str) -> str | None:
    node = parse(f)
    return node.children[0].text if node.kind == "not" else None


def as_implication(f: str) -> tuple[str, str] | None:
    node = parse(f)
    if node.kind == "or" and node.children[0].kind == "not":
        return node.children[0].children[0].text, node.children[1].text
    return None


def atoms_of(f: str) -> frozenset[str]:
    node = parse(f)
    out = set()
    stack = [node]
    while stack:
        nd = stack.pop()
        if nd.kind in ("not", "or"):
            stack.extend(nd.children)
        else:
            out.add(nd.text)
    return frozenset(out)


def evaluate(f: str, assignment: Mapping[str, bool]) -> bool:
    def ev(nd: Node) -> bool:
        if nd.kind == "not":
            return not ev(nd.children[0])
        if nd.kind == "or":
            return ev(nd.children[0]) or ev(nd.children[1])
        return assignment[nd.text]

    return ev(parse(f))


# schema patterns: metavariables are strings, ("neg", p) and ("imp", p, q)
SCHEMAS = {
    "K": ("imp", "A", ("imp", "B", "A")),
    "S": ("imp", ("imp", "A", ("imp", "B", "C")), ("imp", ("imp", "A", "B"), ("imp", "A", "C"))),
    "CONTRA": ("imp", ("imp", ("neg", "A"), ("neg", "B")), ("imp", "B", "A")),
}


def _match(pattern, node: Node, env: dict) -> bool:
    if isinstance(pattern, str):
        bound = env.setdefault(pattern, node.text)
        return bound == node.text
    if pattern[0] == "neg":
        return node.kind == "not" and _match(pattern[1], node.children[0], env)
    left, right = node.children if node.kind == "or" else (None, None)
    return (node.kind == "or" and left.kind == "not"
            and _match(pattern[1], left.children[0], env) and _match(pattern[2], right, env))


@lru_cache(maxsize=200_000)
def schema_of(f: str) -> str | None:
    """Name of the logical axiom schema ``f`` instantiates, if any."""
    node = parse(f)
    for name, pattern in SCHEMAS.items():
        if _match(pattern, node, {}):
            return name
    return None


def _instantiate(pattern, env: Mapping[str, str]) -> str:
    if isinstance(pattern, str):
        return env[pattern]
    if pattern[0] == "neg":
        return neg(_instantiate(pattern[1], env))
    return imp(_instantiate(pattern[1], env), _instantiate(pattern[2], env))


# -- theories -------------------------------------------------------------------

class ProofError(ValueError):
    pass


@dataclass(frozen=True)
class Theory:
    """Nonlogical axioms plus the atoms of the theory's language."""

    axioms: frozenset[str]
    atoms: frozenset[str]

    @classmethod
    def of(cls, axioms: Iterable[str], atoms: Iterable[str] = ()) -> "Theory":
        axioms = frozenset(axioms)
        for a in axioms:
            parse(a)  # raises GrammarError
        language = set(atoms)
        for a in language:
            if as_negation(a) is not None or parse(a).kind == "or":
                raise GrammarError(f"{a!r} is compound, not an atom")
        for a in axioms:
            language |= atoms_of(a)
        return cls(axioms, frozenset(language))

    def in_language(self, f: str) -> bool:
        return atoms_of(f) <= self.atoms

    def sorted_axioms(self) -> list[str]:
        return sorted(self.axioms, key=formula_key)

    def __str__(self):
        return "{" + ", ".join(self.sorted_axioms()) + "}"


def is_axiom(f: str, T: Theory) -> bool:
    return f in T.axioms or schema_of(f) is not None


def mp_conclusions(lines: Iterable[str]) -> set[str]:
    """Everything one modus ponens step yields from ``lines``."""
    have = set(lines)
    out = set()
    for g in have:
        split = as_implication(g)
        if split and split[0] in have:
            out.add(split[1])
    return out


def justify(lines: Sequence[str], T: Theory) -> list[str | None]:
    """Per-line reason: 'axiom', a schema name, 'mp', or None when unjustified."""
    reasons: list[str | None] = []
    earlier: set[str] = set()
    for f in lines:
        parse(f)
        if not T.in_language(f):
            reasons.append(None)
        elif f in T.axioms:
            reasons.append("axiom")
        elif schema_of(f):
            reasons.append(schema_of(f))
        elif any((sp := as_implication(g)) and sp[1] == f and sp[0] in earlier for g in earlier):
            reasons.append("mp")
        else:
            reasons.append(None)
        earlier.add(f)
    return reasons


def check_proof(lines: Sequence[str], T: Theory) -> bool:
    """True iff every line is an axiom or follows from earlier lines by MP.

    Ungrammatical lines raise GrammarError rather than returning False.
    """
    lines = list(lines)
    if not lines:
        return False
    return all(r is not None for r in justify(lines, T))


def is_inconsistency_proof(lines: Sequence[str]) -> bool:
    x = as_negation(lines[-1])
    return x is not None and x in lines[:-1]


# -- truth tables ---------------------------------------------------------------

def models(T: Theory, atoms: Iterable[str] | None = None) -> Iterator[dict[str, bool]]:
    names = sorted(set(atoms) if atoms is not None else T.atoms, key=formula_key)
    for values in itertools.product((True, False), repeat=len(names)):
        env = dict(zip(names, values))
        if all(evaluate(a, env) for a in T.axioms):
            yield env


def satisfiable(T: Theory) -> bool:
    return next(models(T), None) is not None


# -- enumeration --------------------------------------------------------------------

class Mode(Enum):
    CONSISTENT = "Consistent"
    INCONSISTENT = "InconsistentMode"


@dataclass(frozen=True)
class Emission:
    mode: Mode
    lines: tuple[str, ...]
    step: int


def proof_text(lines: Sequence[str], spacer: str = DEFAULT_ALPHABET.spacer) -> str:
    return spacer.join(lines)


def proof_key(lines: Sequence[str]) -> tuple:
    text = proof_text(lines)
    return (len(text), formula_key(text))


class LanguageFormulas:
    """Propositional formulas over a fixed atom set, generated lazily in
    digit-lexicographic order."""

    CACHE_LENGTH = 16

    def __init__(self, atoms: Iterable[str]):
        self.atoms = sorted(set(atoms), key=formula_key)
        self._cache: dict[int, list[str]] = {}

    @property
    def min_length(self) -> int:
        return min((len(a) for a in self.atoms), default=0)

    def of_length(self, n: int) -> Iterator[str]:
        if n <= self.CACHE_LENGTH:
            if n not in self._cache:
                self._cache[n] = list(self._exact(n))
            return iter(self._cache[n])
        return self._exact(n)

    def _exact(self, n: int) -> Iterator[str]:
        lo = self.min_length
        if not lo or n < lo:
            return iter(())
        atoms = [a for a in self.atoms if len(a) == n]
        negs = (neg(f) for f in self.of_length(n - 1)) if n - 1 >= lo else iter(())
        return heapq.merge(atoms, negs, self._disjunctions(n), key=formula_key)

    def _disjunctions(self, n: int) -> Iterator[str]:
        lo = self.min_length
        for a in self.with_lengths(range(lo, n - 2 - lo)):
            for b in self.of_length(n - 3 - len(a)):
                yield disj(a, b)

    def with_lengths(self, lengths: Iterable[int]) -> Iterator[str]:
        """All formulas whose length lies in ``lengths``, in lex order."""
        return heapq.merge(*(self.of_length(n) for n in sorted(set(lengths))), key=formula_key)

    def up_to(self, n: int) -> list[str]:
        return list(self.with_lengths(range(1, n + 1)))


def _metavariables(pattern) -> list[str]:
    """Metavariables in reading order, with repeats."""
    if isinstance(pattern, str):
        return [pattern]
    return [v for part in pattern[1:] for v in _metavariables(part)]


def _shape(pattern) -> tuple[int, list[tuple[str, int]]]:
    """Fixed symbol count and (metavariable, multiplicity) in first-use order."""
    names = _metavariables(pattern)
    order = list(dict.fromkeys(names))
    fixed = len(_instantiate(pattern, {v: "" for v in order}))
    return fixed, [(v, names.count(v)) for v in order]


SCHEMA_SHAPES = {name: _shape(p) for name, p in SCHEMAS.items()}


def _schema_instances(lang: LanguageFormulas, lengths: frozenset[int]) -> Iterator[str]:
    """Logical axiom instances whose length lies in ``lengths``, in lex order.

    Formulas are prefix-free, so an instance's position in lex order is fixed
    by its metavariables in reading order.
    """
    lo = lang.min_length
    if not lengths or not lo:
        return iter(())

    def fill(name, slots, env, budgets):
        var, mult = slots[0]
        rest = slots[1:]
        floor = sum(c * lo for _, c in rest)
        if rest:
            top = max(budgets) - floor
            choices = lang.with_lengths(range(lo, top // mult + 1))
        else:
            choices = lang.with_lengths(b // mult for b in budgets if b >= mult * lo and b % mult == 0)
        for f in choices:
            env[var] = f
            if rest:
                left = [b - mult * len(f) for b in budgets if b - mult * len(f) >= floor]
                if left:
                    yield from fill(name, rest, env, left)
            else:
                yield _instantiate(SCHEMAS[name], env)

    def instances(name):
        fixed, slots = SCHEMA_SHAPES[name]
        budgets = [n - fixed for n in sorted(lengths) if n - fixed >= sum(c * lo for _, c in slots)]
        return fill(name, slots, {}, budgets) if budgets else iter(())

    return heapq.merge(*(instances(name) for name in SCHEMAS), key=formula_key)


def _dedup(items: Iterator[str]) -> Iterator[str]:
    last = None
    for f in items:
        if f != last:
            yield f
        last = f


class TheoremStream:
    """Canonical enumeration of the proofs of a theory.

    Proofs come out by total encoded length (lines joined by the spacer),
    ties broken lexicographically on the digit encoding.  Lines are
    prefix-free, so a depth-first walk over lines in lex order visits the
    proofs of each total length in exactly that order.  After every proof
    the terminal line is compared with the earlier lines; once it is the
    negation of one of them the stream switches to InconsistentMode and from
    then on lists every grammatical formula, shortest first.

    ``budget`` counts steps: one per proof line tried and one per formula
    emitted in InconsistentMode.
    """

    def __init__(self, T: Theory, budget: int, max_length: int = 400):
        if budget < 1:
            raise ValueError("budget must be at least 1")
        self.T = T
        self.budget = budget
        self.max_length = max_length
        self.mode = Mode.CONSISTENT
        self.steps = 0
        self.flipped_at: tuple[str, ...] | None = None
        self._lang = LanguageFormulas(T.atoms)
        self._axioms = sorted(T.axioms, key=formula_key)

    def _candidates(self, rem: int, lines: list[str]) -> Iterator[str]:
        lo = self._lang.min_length
        lengths = frozenset([rem, *range(lo, rem - lo)])
        derived = sorted((f for f in mp_conclusions(lines) if len(f) in lengths), key=formula_key)
        axioms = [a for a in self._axioms if len(a) in lengths]
        return _dedup(heapq.merge(axioms, derived, _schema_instances(self._lang, lengths), key=formula_key))

    def _proofs_of_length(self, L: int) -> Iterator[tuple[str, ...]]:
        lines: list[str] = []

        def dfs(rem: int):
            for f in self._candidates(rem, lines):
                if self.steps >= self.budget:
                    return
                self.steps += 1
                lines.append(f)
                if len(f) == rem:
                    yield tuple(lines)
                else:
                    yield from dfs(rem - len(f) - 1)
                lines.pop()

        yield from dfs(L)

    def __iter__(self) -> Iterator[Emission]:
        if not self.T.atoms:
            return
        for L in range(1, self.max_length + 1):
            for proof in self._proofs_of_length(L):
                if is_inconsistency_proof(proof):
                    self.mode = Mode.INCONSISTENT
                    self.flipped_at = proof
                    yield Emission(Mode.INCONSISTENT, proof, self.steps)
                    yield from self._all_formulas()
                    return
                yield Emission(Mode.CONSISTENT, proof, self.steps)
            if self.steps >= self.budget:
                return

    def _all_formulas(self) -> Iterator[Emission]:
        for n in range(1, self.max_length + 1):
            for f in SHIPPED_GRAMMAR.formulas(n):
                if self.steps >= self.budget:
                    return
                self.steps += 1
                yield Emission(Mode.INCONSISTENT, (f,), self.steps)


def enumerate_theorems(T: Theory, budget: int, max_length: int = 400) -> TheoremStream:
    return TheoremStream(T, budget, max_length)


# -- inconsistency proofs ------------------------------------------------------------

def _terminal_negation(state: frozenset[str], T: Theory) -> str | None:
    """A formula X in ``state`` whose negation is justified by ``state``."""
    derivable = mp_conclusions(state)
    for x in sorted(state, key=formula_key):
        nx = neg(x)
        if nx in T.axioms or nx in derivable:
            return x
    return None


def _order(state: frozenset[str], T: Theory) -> list[str]:
    placed: list[str] = []
    left = set(state)
    while left:
        ready = sorted((f for f in left if f in T.axioms or f in mp_conclusions(placed)), key=formula_key)
        placed.append(ready[0])
        left.discard(ready[0])
    return placed


def find_inconsistency_proof(T: Theory, bound: int) -> tuple[str, ...] | None:
    """Shortest (fewest lines) inconsistency proof, by breadth-first search.

    The search runs over proofs whose lines are nonlogical axioms or modus
    ponens consequences.  Logical-axiom lines can only shorten a proof of
    four or more lines (see :func:`short_inconsistency_length`).
    """
    if bound < 2:
        raise ValueError("bound must be at least 2")
    level = {frozenset()}
    seen = set(level)
    for d in range(1, bound + 1):
        if d >= 2:
            for state in sorted(level, key=lambda s: sorted(map(formula_key, s))):
                x = _terminal_negation(state, T)
                if x is not None:
                    return tuple(_order(state, T)) + (neg(x),)
        if d == bound:
            break
        nxt = set()
        for state in level:
            for f in (T.axioms | mp_conclusions(state)) - state:
                s2 = state | {f}
                if s2 not in seen:
                    seen.add(s2)
                    nxt.add(s2)
        level = nxt
        if not level:
            break
    return None


def shortest_inconsistency_proof(T: Theory, bound: int) -> int | None:
    proof = find_inconsistency_proof(T, bound)
    return None if proof is None else len(proof)


def short_inconsistency_length(T: Theory) -> int | None:
    """Exact test for inconsistency proofs of at most three lines.

    Logical axioms are never negations, and a three-line proof leaves no room
    for modus ponens before the last line, so the only candidates are
    [X, ¬X] with ¬X an axiom, and [X, (¬X∨¬X), ¬X] with (¬X∨¬X) an axiom.
    In both X must be a nonlogical or logical axiom.
    """
    best = None
    for f in T.axioms:
        x = as_negation(f)
        if x is not None and is_axiom(x, T):
            return 2
        split = as_implication(f)
        if split and split[1] == neg(split[0]) and is_axiom(split[0], T):
            best = 3
    return best


# -- complexity proxy ------------------------------------------------------------------

def serialize_axioms(T: Theory) -> str:
    """Self-delimiting bit string: 16-bit count, then per axiom a 16-bit
    length and fixed-width digit codes, axioms in canonical order."""
    from .alphabet import DigitMap

    d = DigitMap.canonical(DEFAULT_ALPHABET)
    parts = [format(len(T.axioms), f"0{FIELD_BITS}b")]
    for f in T.sorted_axioms():
        if len(f) >= 2 ** FIELD_BITS:
            raise ProofError("axiom too long for the length field")
        parts.append(format(len(f), f"0{FIELD_BITS}b"))
        parts.extend(format(d.digit(ch), f"0{SYMBOL_BITS}b") for ch in f)
    return "".join(parts)


def axiom_complexity(T: Theory) -> int:
    """Bit length of :func:`serialize_axioms`; an upper-bound proxy for the
    algorithmic complexity of the axiom set."""
    return len(serialize_axioms(T))


def extend_theory(T: Theory, extra: Iterable[str]) -> Theory:
    extra = list(extra)
    for f in extra:
        parse(f)
    return Theory.of(T.axioms | frozenset(extra), T.atoms)


# -- meaning on branching word strings -------------------------------------------------

@dataclass(frozen=True)
class Meaning:
    """The word ``word`` asserts that ``about`` does (or does not) occur in
    the string it appears in.  ``negation`` names the word that negates it."""

    word: str
    about: str
    occurs: bool = True
    negation: str | None = None

    def holds(self, words: Sequence[str]) -> bool:
        return (self.about in words) == self.occurs


@dataclass(frozen=True)
class MeaningReport:
    valid: bool
    complete: bool
    path_consistent: bool
    violations: tuple[str, ...] = ()

    def to_record(self) -> dict:
        return {"valid": self.valid, "complete": self.complete,
                "path_consistent": self.path_consistent, "violations": list(self.violations)}


def _words(branch) -> tuple[str, ...]:
    if isinstance(branch, str):
        return tuple(w for w in branch.replace(DEFAULT_ALPHABET.spacer, " ").split() if w)
    return tuple(branch)


def evaluate_meaning(branches: Sequence[tuple[complex, object]], meanings: Iterable[Meaning],
                     tol: float = 1e-10) -> MeaningReport:
    """Validity, completeness and path consistency over superposed branches.

    A meaningful word is only evaluated on branches that contain it.
    """
    meanings = list(meanings)
    total = sum(abs(a) ** 2 for a, _ in branches)
    if abs(total - 1.0) > tol:
        raise ValueError(f"branch amplitudes are not normalized (sum |a|^2 = {total})")
    live = [_words(b) for a, b in branches if abs(a) > 0]
    problems = []
    valid = True
    for i, words in enumerate(live):
        for mn in meanings:
            if mn.word in words and not mn.holds(words):
                valid = False
                problems.append(f"branch {i}: {mn.word} is false")
    complete = True
    for mn in meanings:
        if not any(mn.word in words for words in live):
            complete = False
            problems.append(f"{mn.word} never occurs")
    consistent = True
    for i, words in enumerate(live):
        for mn in meanings:
            if mn.negation and mn.word in words and mn.negation in words:
                consistent = False
                problems.append(f"branch {i}: {mn.word} with its negation {mn.negation}")
    return MeaningReport(valid, complete, consistent, tuple(problems))


# -- meaning versus complexity --------------------------------------------------------

def literal_pool(atoms: Sequence[str] = DEFAULT_ATOMS) -> list[str]:
    lits = [f for a in atoms for f in (a, neg(a))]
    pool = list(lits)
    for p in lits:
        for q in lits:
            if atoms_of(p) != atoms_of(q):
                pool.append(imp(p, q))
    return sorted(pool, key=formula_key)


@dataclass
class ComplexityPair:
    T1: Theory
    T2: Theory
    bits1: int
    bits2: int
    model1: dict[str, bool]
    t2_satisfiable: bool
    shortest2: int
    proof2: tuple[str, ...]
    proof2_checks: bool
    no_short_proof2: bool
    t1_theorems_checked: int
    t1_theorems_true: bool
    tries: int
    threshold: int
    max_bits_gap: int
    checks: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return all(self.checks.values())

    def to_record(self) -> dict:
        return {
            "T1": self.T1.sorted_axioms(), "T2": self.T2.sorted_axioms(),
            "atoms": sorted(self.T1.atoms | self.T2.atoms, key=formula_key),
            "bits_T1": self.bits1, "bits_T2": self.bits2, "bits_gap": abs(self.bits1 - self.bits2),
            "model_T1": {k: v for k, v in sorted(self.model1.items())},
            "T2_satisfiable": self.t2_satisfiable,
            "shortest_inconsistency_T2": self.shortest2,
            "inconsistency_proof_T2": list(self.proof2),
            "T1_theorems_checked": self.t1_theorems_checked,
            "checks": dict(self.checks), "verified": self.verified, "tries": self.tries,
        }


def generate_complexity_pair(seed: int = 0, n_axioms: int = 4, atoms: Sequence[str] = DEFAULT_ATOMS,
                             threshold: int = 4, max_bits_gap: int = 8, bound: int = 8,
                             theorem_budget: int = 20_000, max_tries: int = 200_000) -> ComplexityPair:
    """Find T1 (satisfiable) and T2 (unsatisfiable, no inconsistency proof
    shorter than ``threshold`` lines) whose axiom sets have nearly the same
    serialized size."""
    rng = random.Random(seed)
    pool = literal_pool(atoms)
    tries = 0
    t2 = proof = None
    # the inconsistent side is the rare one, so find it first
    while tries < max_tries:
        tries += 1
        cand = Theory.of(rng.sample(pool, n_axioms), atoms)
        if satisfiable(cand) or short_inconsistency_length(cand) is not None:
            continue
        proof = find_inconsistency_proof(cand, bound)
        if proof is not None and len(proof) >= threshold:
            t2 = cand
            break
    if t2 is None:
        raise RuntimeError(f"no qualifying inconsistent theory within {max_tries} tries")
    bits2 = axiom_complexity(t2)
    t1 = None
    while tries < max_tries:
        tries += 1
        cand = Theory.of(rng.sample(pool, n_axioms), atoms)
        if abs(axiom_complexity(cand) - bits2) <= max_bits_gap and satisfiable(cand):
            t1 = cand
            break
    if t1 is None:
        raise RuntimeError(f"no satisfiable theory within {max_bits_gap} bits found in {max_tries} tries")
    bits1 = axiom_complexity(t1)

    model = next(models(t1))
    stream = enumerate_theorems(t1, theorem_budget)
    checked, all_true = 0, True
    for em in stream:
        for line in em.lines:
            checked += 1
            all_true &= evaluate(line, model)
    pair = ComplexityPair(
        T1=t1, T2=t2, bits1=bits1, bits2=bits2, model1=model,
        t2_satisfiable=satisfiable(t2), shortest2=len(proof), proof2=proof,
        proof2_checks=check_proof(proof, t2) and is_inconsistency_proof(proof),
        no_short_proof2=short_inconsistency_length(t2) is None,
        t1_theorems_checked=checked, t1_theorems_true=all_true and stream.mode is Mode.CONSISTENT,
        tries=tries, threshold=threshold, max_bits_gap=max_bits_gap)
    pair.checks = {
        "T1_has_model": True,
        "T1_theorems_hold_in_model": pair.t1_theorems_true,
        "T2_has_no_model": not pair.t2_satisfiable,
        "T2_inconsistency_proof_valid": pair.proof2_checks,
        "T2_shortest_inconsistency_at_least_threshold": pair.shortest2 >= threshold and pair.no_short_proof2,
        "complexity_gap_within_bound": abs(bits1 - bits2) <= max_bits_gap,
    }
    return pair
