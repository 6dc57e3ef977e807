"""Language-preserving machine-to-machine constructions.

Every transform here returns a new :class:`CounterMachine` accepting the same
language as its input; the test-suite certifies each one by exhaustive
difftesting on short strings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import prod
from typing import Sequence

from .errors import ContractError, InputError, UnsupportedVariantError
from .machine import RESET, Add, Configuration, CounterMachine, Reset

__all__ = [
    "RingCounterPlan", "ring_plan", "to_incremental", "decode_incremental",
    "to_stateless", "decode_stateless",
    "threshold_to_general", "general_to_threshold",
    "BooleanCombinator", "combine",
    "NOT", "AND", "OR", "DIFF", "SYMDIFF",
    "complement", "union", "intersection", "difference", "symmetric_difference",
]


class _Radix:
    """Mixed-radix codec between tuples and flat indices (first digit most
    significant)."""

    def __init__(self, sizes: Sequence[int]):
        self.sizes = tuple(sizes)
        self.total = prod(self.sizes)

    def encode(self, digits) -> int:
        index = 0
        for digit, size in zip(digits, self.sizes):
            index = index * size + digit
        return index

    def decode(self, index: int) -> tuple:
        out = []
        for size in reversed(self.sizes):
            index, digit = divmod(index, size)
            out.append(digit)
        return tuple(reversed(out))


def _require_plain(machine: CounterMachine, what: str):
    if machine.thresholds is not None:
        raise UnsupportedVariantError(
            f"{what} needs a zero-check machine; convert threshold machines with threshold_to_general first")


# -- ring counters: general -> incremental --------------------------------

@dataclass(frozen=True)
class RingCounterPlan:
    """Counter ``i`` of the source is held as ``c' = c // d_i`` in a counter
    plus ``c mod d_i`` in finite state (floor division, so the remainder is
    always in ``[0, d_i)`` even for negative ``c``)."""

    moduli: tuple
    num_source_states: int

    @property
    def state_factor(self) -> str:
        return " x ".join(f"Z/{d}" for d in self.moduli) or "(none)"

    @property
    def radix(self) -> _Radix:
        return _Radix((self.num_source_states,) + self.moduli)

    def split(self, c: int, i: int) -> tuple:
        return divmod(c, self.moduli[i])


def ring_plan(machine: CounterMachine) -> RingCounterPlan:
    moduli = []
    for i in range(machine.num_counters):
        column = [acts[i].m for acts in machine.updates.values() if isinstance(acts[i], Add)]
        moduli.append(max([1] + [abs(m) for m in column]))
    return RingCounterPlan(tuple(moduli), machine.num_states)


def to_incremental(machine: CounterMachine) -> CounterMachine:
    """Simulate every counter with a +-1 counter plus a finite remainder."""
    _require_plain(machine, "to_incremental")
    plan = ring_plan(machine)
    radix = plan.radix
    d = plan.moduli

    def source_view(state, mask):
        q, *rem = radix.decode(state)
        # The source counter is zero iff both the quotient and remainder are.
        source_mask = tuple(0 if (bit == 0 and r == 0) else 1 for bit, r in zip(mask, rem))
        return q, rem, source_mask

    def move(symbol, state, mask):
        q, rem, b = source_view(state, mask)
        actions, new_rem = [], []
        for action, r, di in zip(machine.updates[symbol, q, b], rem, d):
            if isinstance(action, Reset):
                actions.append(RESET)
                new_rem.append(0)
            else:
                carry, r2 = divmod(r + action.m, di)
                actions.append(Add(carry))
                new_rem.append(r2)
        return radix.encode([machine.transitions[symbol, q, b]] + new_rem), actions

    def accept(state, mask):
        q, _, b = source_view(state, mask)
        return (q, b) in machine.accept

    return CounterMachine.from_moves(machine.alphabet, radix.total, machine.num_counters, move, accept)


def decode_incremental(plan: RingCounterPlan, config: Configuration) -> Configuration:
    """Recover the simulated source configuration ``c = d * c' + r``."""
    q, *rem = plan.radix.decode(config.state)
    counters = tuple(di * c + r for di, c, r in zip(plan.moduli, config.counters, rem))
    return Configuration(q, counters)


# -- one-hot state counters: stateful -> stateless ------------------------

def _one_hot(i: int, n: int) -> tuple:
    # State 0 is encoded by the all-zero vector.
    return tuple(1 if (j == i and i != 0) else 0 for j in range(n))


def _decode_one_hot(bits) -> int | None:
    ones = [j for j, bit in enumerate(bits) if bit]
    if not ones:
        return 0
    if len(ones) == 1 and ones[0] != 0:
        return ones[0]
    return None


def to_stateless(machine: CounterMachine) -> CounterMachine:
    """Move the finite state into ``num_states`` extra counters holding a
    one-hot code; the result has a single state."""
    _require_plain(machine, "to_stateless")
    k, n = machine.num_counters, machine.num_states

    def update(symbol, _state, mask):
        b, q_bits = mask[:k], mask[k:]
        i = _decode_one_hot(q_bits)
        if i is None:
            # Not a valid state code; never reached from the initial configuration.
            return [Add(0)] * (k + n)
        j = machine.transitions[symbol, i, b]
        src, dst = _one_hot(i, n), _one_hot(j, n)
        return list(machine.updates[symbol, i, b]) + [Add(y - x) for x, y in zip(src, dst)]

    def accept(_state, mask):
        i = _decode_one_hot(mask[k:])
        return i is not None and (i, mask[:k]) in machine.accept

    return CounterMachine.tabulate(machine.alphabet, 1, k + n, update, lambda *_: 0, accept)


def decode_stateless(source: CounterMachine, config: Configuration) -> Configuration:
    k = source.num_counters
    q = _decode_one_hot(config.counters[k:])
    if q is None:
        raise ContractError(f"state counters {config.counters[k:]} are not a one-hot code")
    return Configuration(q, tuple(config.counters[:k]))


# -- thresholds ------------------------------------------------------------

def general_to_threshold(machine: CounterMachine) -> CounterMachine:
    """Zero-checks from threshold checks: each counter is duplicated, one copy
    tested with ``<= -1`` and one with ``<= 0``; ``c = 0`` iff the first test
    fails and the second holds."""
    _require_plain(machine, "general_to_threshold")
    k = machine.num_counters

    def zero_mask(mask):
        return tuple(0 if (mask[2 * i] == 0 and mask[2 * i + 1] == 1) else 1 for i in range(k))

    def update(symbol, q, mask):
        acts = machine.updates[symbol, q, zero_mask(mask)]
        return [a for a in acts for _ in range(2)]

    return CounterMachine.tabulate(
        machine.alphabet, machine.num_states, 2 * k, update,
        lambda symbol, q, mask: machine.transitions[symbol, q, zero_mask(mask)],
        lambda q, mask: (q, zero_mask(mask)) in machine.accept,
        thresholds=(-1, 0) * k,
    )


_AT_ZERO = 0


def threshold_to_general(machine: CounterMachine) -> CounterMachine:
    """Eliminate ``c <= m`` checks in favour of zero-checks.

    For each counter we keep ``g = c - m`` as ``g = D * g' + r`` with ``g'`` in
    a real counter and ``r`` in ``[0, D)`` in finite state, where ``D`` is
    the largest step applied to that counter.  Since ``g'`` then moves by at
    most one per step, its sign can be tracked in finite state as well, and
    ``c <= m`` holds iff ``g' < 0``, or ``g' = 0`` and ``r = 0``.

    Right after a reset (and initially) ``c`` is known to be 0 and the
    counter sits in a distinguished mode; the next additive step jumps
    straight to ``g' = (a - m) // D``.  This handles every integer threshold,
    including ``m <= 0``.

    A machine without thresholds is returned unchanged.
    """
    if machine.thresholds is None:
        return machine
    k = machine.num_counters
    thresholds = machine.thresholds
    steps = []
    for i in range(k):
        column = [acts[i].m for acts in machine.updates.values() if isinstance(acts[i], Add)]
        steps.append(max([1] + [abs(m) for m in column]))
    # Per-counter local mode: 0 = known zero; 1 + 2*r + (0 for g' >= 0, 1 for g' < 0).
    radix = _Radix((machine.num_states,) + tuple(1 + 2 * D for D in steps))

    decoded = [radix.decode(s) for s in range(radix.total)]

    @lru_cache(maxsize=None)
    def view(state, mask):
        q, *modes = decoded[state]
        bits = []
        for i, mode in enumerate(modes):
            if mode == _AT_ZERO:
                bits.append(1 if 0 <= thresholds[i] else 0)
                continue
            r, negative = divmod(mode - 1, 2)
            if mask[i] == 0:
                bits.append(1 if r == 0 else 0)
            else:
                bits.append(1 if negative else 0)
        return q, modes, tuple(bits)

    @lru_cache(maxsize=None)
    def step_counter(i, mode, g_is_zero, action):
        """Return (counter action, next local mode)."""
        D, m = steps[i], thresholds[i]
        if isinstance(action, Reset):
            return RESET, _AT_ZERO
        if mode == _AT_ZERO:
            g = action.m - m
            jump, r = divmod(g, D)
            return Add(jump), 1 + 2 * r + (1 if jump < 0 else 0)
        r, negative = divmod(mode - 1, 2)
        delta, r2 = divmod(r + action.m, D)
        if g_is_zero:
            negative = 1 if delta < 0 else 0
        return Add(delta), 1 + 2 * r2 + negative

    def move(symbol, state, mask):
        q, modes, b = view(state, mask)
        acts = machine.updates[symbol, q, b]
        results = [step_counter(i, modes[i], mask[i] == 0, acts[i]) for i in range(k)]
        nxt = radix.encode([machine.transitions[symbol, q, b]] + [mode for _, mode in results])
        return nxt, [a for a, _ in results]

    def accept(state, mask):
        q, _, b = view(state, mask)
        return (q, b) in machine.accept

    return CounterMachine.from_moves(machine.alphabet, radix.total, k, move, accept)


# -- closure under boolean combinations -----------------------------------

@dataclass(frozen=True)
class BooleanCombinator:
    """An ``arity``-ary boolean function given as a truth table.

    Entry ``table[i]`` is the output for the membership bits of ``i`` written
    in binary with the first machine as the most significant bit, so
    ``"0001"`` is AND and ``"1101"`` is "first implies second".
    """

    arity: int
    table: tuple

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(bool(v)) for v in self.table))
        if self.arity < 1 or len(self.table) != 2 ** self.arity:
            raise ContractError(f"a {self.arity}-ary combinator needs {2 ** self.arity} table entries")

    @classmethod
    def from_string(cls, bits: str) -> "BooleanCombinator":
        n = len(bits)
        arity = n.bit_length() - 1
        if n < 2 or 2 ** arity != n or any(ch not in "01" for ch in bits):
            raise ContractError(f"combinator table must be 2^m characters of 0/1, got {bits!r}")
        return cls(arity, tuple(int(ch) for ch in bits))

    def __call__(self, *bits) -> bool:
        if len(bits) != self.arity:
            raise ContractError(f"expected {self.arity} arguments, got {len(bits)}")
        index = 0
        for bit in bits:
            index = 2 * index + (1 if bit else 0)
        return bool(self.table[index])

    def __str__(self):
        return "".join(map(str, self.table))


NOT = BooleanCombinator.from_string("10")
AND = BooleanCombinator.from_string("0001")
OR = BooleanCombinator.from_string("0111")
DIFF = BooleanCombinator.from_string("0010")
SYMDIFF = BooleanCombinator.from_string("0110")


def combine(machines: Sequence[CounterMachine], p: BooleanCombinator) -> CounterMachine:
    """Run the machines in parallel and accept iff ``p`` of their verdicts
    holds.

    States multiply and counters add up.  Threshold and plain inputs may be
    mixed; plain ones are then converted with :func:`general_to_threshold`.
    """
    machines = list(machines)
    if len(machines) != p.arity:
        raise ContractError(f"combinator has arity {p.arity} but {len(machines)} machines were given")
    alphabet = machines[0].alphabet
    for other in machines[1:]:
        if set(other.alphabet) != set(alphabet):
            raise InputError(f"alphabet mismatch: {list(alphabet)} vs {list(other.alphabet)}")
    thresholded = any(m.thresholds is not None for m in machines)
    if thresholded:
        machines = [m if m.thresholds is not None else general_to_threshold(m) for m in machines]

    ks = [m.num_counters for m in machines]
    offsets = list(itertools.accumulate([0] + ks))
    radix = _Radix([m.num_states for m in machines])

    def parts(state, mask):
        qs = radix.decode(state)
        bs = [tuple(mask[offsets[j]:offsets[j + 1]]) for j in range(len(machines))]
        return qs, bs

    def move(symbol, state, mask):
        qs, bs = parts(state, mask)
        actions, nxt = [], []
        for m, q, b in zip(machines, qs, bs):
            actions.extend(m.updates[symbol, q, b])
            nxt.append(m.transitions[symbol, q, b])
        return radix.encode(nxt), actions

    def accept(state, mask):
        qs, bs = parts(state, mask)
        return p(*[(q, b) in m.accept for m, q, b in zip(machines, qs, bs)])

    thresholds = None
    if thresholded:
        thresholds = tuple(t for m in machines for t in m.thresholds)
    return CounterMachine.from_moves(alphabet, radix.total, sum(ks), move, accept, thresholds)


def complement(machine: CounterMachine) -> CounterMachine:
    return combine([machine], NOT)


def intersection(a: CounterMachine, b: CounterMachine) -> CounterMachine:
    return combine([a, b], AND)


def union(a: CounterMachine, b: CounterMachine) -> CounterMachine:
    return combine([a, b], OR)


def difference(a: CounterMachine, b: CounterMachine) -> CounterMachine:
    return combine([a, b], DIFF)


def symmetric_difference(a: CounterMachine, b: CounterMachine) -> CounterMachine:
    return combine([a, b], SYMDIFF)
