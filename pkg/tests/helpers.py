"""Shared corpus and brute-force oracles for the test-suite.

The oracles here deliberately avoid the package's own machinery: they work on
plain token tuples and set definitions.
"""

import itertools
import random

from countra.generate import random_machine, random_qscl_machine
from countra.languages import (L1, L2, L3, amb2m_incremental_machine, amb2m_machine, dyck1_machine,
                               fig1_machine, lm_machine, parity_machine)

CORPUS_SEED = 20261016


def is_anbn(x):
    n = len(x) // 2
    return len(x) % 2 == 0 and tuple(x) == ("a",) * n + ("b",) * n


def is_amb2m(x):
    m = len(x) // 3
    return len(x) % 3 == 0 and tuple(x) == ("a",) * m + ("b",) * (2 * m)


def is_dyck1(x):
    depth = 0
    for t in x:
        depth += 1 if t == "(" else -1
        if depth < 0:
            return False
    return depth == 0


def lm_strings(arities, max_len):
    """Every expression of the prefix grammar with length <= max_len, built
    by expanding the grammar bottom-up (no parsing involved)."""
    tokens_by_arity = {}
    for token, arity in arities.items():
        tokens_by_arity.setdefault(arity, []).append(token)
    exact = {n: set() for n in range(max_len + 1)}

    def sequences(count, budget):
        # All tuples of `count` expressions with total length exactly `budget`.
        if count == 0:
            if budget == 0:
                yield ()
            return
        for first in range(1, budget + 1):
            for head in exact[first]:
                for rest in sequences(count - 1, budget - first):
                    yield (head,) + rest

    for n in range(1, max_len + 1):
        for arity, tokens in tokens_by_arity.items():
            for args in sequences(arity, n - 1):
                flat = tuple(t for arg in args for t in arg)
                for token in tokens:
                    exact[n].add((token,) + flat)
    return set().union(*exact.values())


def tree_eval(tokens):
    """Parse-tree evaluator for prefix boolean expressions."""
    tokens = list(tokens)

    def parse(pos):
        t = tokens[pos]
        if t in ("0", "1"):
            return ("val", int(t)), pos + 1
        left, pos = parse(pos + 1)
        right, pos = parse(pos)
        return (t, left, right), pos

    def ev(node):
        if node[0] == "val":
            return node[1]
        a, b = ev(node[1]), ev(node[2])
        return (a and b) if node[0] == "∧" else (a or b)

    tree, end = parse(0)
    assert end == len(tokens)
    return int(ev(tree))


def random_corpus_machines():
    """Four seeded random machines: k <= 2, |Q| <= 3, |Sigma| <= 3, |m| <= 3."""
    rng = random.Random(CORPUS_SEED)
    specs = [
        (("a", "b"), 3, 2, 3),
        (("a", "b"), 2, 1, 2),
        (("a", "b", "c"), 3, 2, 2),
        (("a", "b", "c"), 2, 2, 3),
        (("a", "b", "c"), 3, 1, 3),
    ]
    return {f"random{i}": random_machine(rng, alphabet, q, k, m, reset_prob=0.15, accept_prob=0.35)
            for i, (alphabet, q, k, m) in enumerate(specs)}


def corpus():
    """The fixed machine corpus, name -> machine."""
    machines = {
        "fig1": fig1_machine(),
        "amb2m": amb2m_machine(),
        "amb2m_incremental": amb2m_incremental_machine(),
        "dyck1": dyck1_machine(),
        "parity": parity_machine(),
        "lm1": lm_machine(L1, guarded=True),
        "lm2": lm_machine(L2, guarded=True),
        "lm3": lm_machine(L3, guarded=True),
        "lm2_final_sum": lm_machine(L2),
    }
    machines.update(random_corpus_machines())
    return machines


def alphabet_groups(machines):
    groups = {}
    for name, m in machines.items():
        groups.setdefault(frozenset(m.alphabet), []).append(name)
    return groups


def qscl_machines(count, seed=7):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        alphabet = ("a", "b", "c")[: rng.randint(1, 3)]
        out.append(random_qscl_machine(rng, alphabet, rng.randint(0, 2)))
    return out


def all_strings(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


# One "PASS/FAIL criterion N: ..." line per acceptance criterion; printed in
# the pytest terminal summary by conftest.py.
ACCEPTANCE_RESULTS = []


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_RESULTS.append((number, line))
    print(line)
    return ok
