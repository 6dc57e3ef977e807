"""Exhaustive bounded enumeration and differential testing.

Strings are enumerated in length-lexicographic order: all strings of length
0, then 1, and so on, each length ordered by the alphabet's token order.
Machines are run breadth-first with configurations shared between strings
that reach the same one, so each distinct configuration per level is stepped
once.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field

from .errors import BudgetExceededError, InputError
from .machine import CounterMachine

DEFAULT_STRING_BUDGET = 5_000_000
ENV_BUDGET = "COUNTRA_MAX_ENUM"


def budget(default: int) -> int:
    """The enumeration guard: ``COUNTRA_MAX_ENUM`` if set, else ``default``."""
    raw = os.environ.get(ENV_BUDGET)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{ENV_BUDGET} must be an integer, got {raw!r}") from None


def count_strings(n_symbols: int, max_len: int) -> int:
    return sum(n_symbols ** n for n in range(max_len + 1))


def strings(alphabet, max_len: int):
    """Yield every token tuple of length <= ``max_len`` in length-lex order."""
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def string_at(alphabet, length: int, index: int) -> tuple:
    """Inverse of the enumeration order within one length."""
    base = len(alphabet)
    out = []
    for _ in range(length):
        index, digit = divmod(index, base)
        out.append(alphabet[digit])
    return tuple(reversed(out))


def _check_budget(n_symbols, max_len, limit):
    total = count_strings(n_symbols, max_len)
    limit = budget(DEFAULT_STRING_BUDGET) if limit is None else limit
    if total > limit:
        raise BudgetExceededError(
            f"enumerating {total} strings exceeds the budget of {limit} (set {ENV_BUDGET} to raise it)")
    return total


def acceptance_levels(machine: CounterMachine, max_len: int, limit: int | None = None) -> list:
    """``levels[n][i]`` is 1 iff the machine accepts the ``i``-th string of
    length ``n``."""
    _check_budget(len(machine.alphabet), max_len, limit)
    alphabet = machine.alphabet
    start = (0, (0,) * machine.num_counters)
    uniq = [start]
    ids = [0]
    levels = []
    for n in range(max_len + 1):
        final = [machine.is_final(s, c) for s, c in uniq]
        levels.append(bytes(final[i] for i in ids))
        if n == max_len:
            break
        index = {}
        next_uniq = []
        moves = []
        for s, c in uniq:
            row = []
            for symbol in alphabet:
                cfg = machine.advance(s, c, symbol)
                j = index.get(cfg)
                if j is None:
                    j = index[cfg] = len(next_uniq)
                    next_uniq.append(cfg)
                row.append(j)
            moves.append(row)
        ids = [j for i in ids for j in moves[i]]
        uniq = next_uniq
    return levels


def predicate_levels(predicate, alphabet, max_len: int, limit: int | None = None) -> list:
    """Same layout as :func:`acceptance_levels` for a Python predicate on
    token tuples (used for brute-force oracles)."""
    _check_budget(len(alphabet), max_len, limit)
    return [bytes(bool(predicate(x)) for x in itertools.product(alphabet, repeat=n))
            for n in range(max_len + 1)]


def language(machine: CounterMachine, max_len: int) -> set:
    """The accepted strings of length <= ``max_len`` as a set of tuples."""
    out = set()
    for n, level in enumerate(acceptance_levels(machine, max_len)):
        for i, bit in enumerate(level):
            if bit:
                out.add(string_at(machine.alphabet, n, i))
    return out


@dataclass
class DiffReport:
    tested_count: int
    max_len: int
    counterexamples: list = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return not self.counterexamples

    def to_dict(self, sep: str = "") -> dict:
        return {
            "tested_count": self.tested_count,
            "max_len": self.max_len,
            "agree": self.agree,
            "counterexamples": [
                {"string": sep.join(x), "a": a, "b": b} for x, a, b in self.counterexamples
            ],
        }


def compare_levels(alphabet, levels_a, levels_b, max_len) -> DiffReport:
    report = DiffReport(tested_count=0, max_len=max_len)
    for n, (la, lb) in enumerate(zip(levels_a, levels_b)):
        report.tested_count += len(la)
        if la == lb:
            continue
        for i, (a, b) in enumerate(zip(la, lb)):
            if a != b:
                report.counterexamples.append((string_at(alphabet, n, i), bool(a), bool(b)))
    return report


def difftest(a: CounterMachine, b: CounterMachine, max_len: int, limit: int | None = None) -> DiffReport:
    """Compare two machines on every string of length <= ``max_len``."""
    if tuple(a.alphabet) != tuple(b.alphabet):
        if set(a.alphabet) != set(b.alphabet):
            raise InputError(f"alphabet mismatch: {list(a.alphabet)} vs {list(b.alphabet)}")
        # Same tokens in a different order: run b over a's order.
        b = _reorder(b, a.alphabet)
    return compare_levels(a.alphabet, acceptance_levels(a, max_len, limit),
                          acceptance_levels(b, max_len, limit), max_len)


def difftest_predicate(machine: CounterMachine, predicate, max_len: int, limit: int | None = None) -> DiffReport:
    """Compare a machine (side ``a``) with a brute-force oracle (side ``b``)."""
    return compare_levels(machine.alphabet, acceptance_levels(machine, max_len, limit),
                          predicate_levels(predicate, machine.alphabet, max_len, limit), max_len)


def _reorder(machine: CounterMachine, alphabet) -> CounterMachine:
    return CounterMachine(tuple(alphabet), machine.num_states, machine.num_counters,
                          machine.updates, machine.transitions, machine.accept, machine.thresholds)
