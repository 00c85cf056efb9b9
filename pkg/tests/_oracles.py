"""Independent brute-force oracles for the proof stream."""
from lattlang.grammar import is_formula
from lattlang.theory_engine import proof_key


def language_formulas(atoms, max_len):
    """All formulas over ``atoms`` up to ``max_len`` symbols, built bottom-up."""
    by_len = {}
    for n in range(1, max_len + 1):
        out = [a for a in atoms if len(a) == n]
        out += ["¬" + f for f in by_len.get(n - 1, [])]
        for i in range(1, n - 3):
            out += ["(" + f + "∨" + g + ")" for f in by_len.get(i, []) for g in by_len.get(n - 3 - i, [])]
        by_len[n] = out
    return [f for fs in by_len.values() for f in fs]


def is_k_instance(f):
    if not f.startswith("(¬"):
        return False
    for i in range(3, len(f)):
        a = f[2:i]
        head = "(¬" + a + "∨(¬"
        tail = "∨" + a + "))"
        if f.startswith(head) and f.endswith(tail) and len(f) > len(head) + len(tail):
            b = f[len(head):len(f) - len(tail)]
            if is_formula(a) and is_formula(b):
                return True
    return False


def valid_lines(lines, axioms):
    for i, f in enumerate(lines):
        earlier = lines[:i]
        if f in axioms or is_k_instance(f):
            continue
        if any("(¬" + a + "∨" + f + ")" in earlier for a in earlier):
            continue
        return False
    return True


def brute_force_proofs(atoms, axioms, max_total):
    pool = language_formulas(atoms, max_total)
    found = []

    def grow(lines, used):
        for f in pool:
            total = used + len(f) + (1 if lines else 0)
            if total > max_total:
                continue
            proof = lines + [f]
            if valid_lines(proof, axioms):
                found.append(tuple(proof))
            grow(proof, total)

    grow([], 0)
    return sorted(found, key=proof_key)
