"""Real-time counter machines: data model, execution and variant checks.

A machine reads one token per step.  Each step looks at the current state and
a finite *mask* of the counters (zero-checks for plain machines, ``c <= m``
predicates for threshold machines), then applies one update action per
counter and moves to the next state.  Both the update and the transition read
the mask of the configuration *before* the step.

Tables are stored explicitly over the whole finite domain
``alphabet x states x {0,1}^k``, which keeps validation and serialization a
matter of inspection.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .errors import ContractError, InputError

__all__ = [
    "Add", "Reset", "RESET", "Action", "parse_action",
    "Configuration", "CounterMachine", "VariantReport",
    "all_masks", "mask_of", "step", "accepts", "run_trace", "classify",
    "as_tokens", "format_mask", "parse_mask", "COUNTER_LIMIT",
]

# Counters are Python ints, so they cannot wrap; we still refuse to leave the
# signed 64-bit range so results stay portable.
COUNTER_LIMIT = 2**63 - 1

Mask = tuple
Key = tuple  # (symbol, state, mask)


@dataclass(frozen=True)
class Add:
    """Add the constant ``m`` (possibly negative or zero) to a counter."""

    m: int

    def apply(self, value: int) -> int:
        return value + self.m

    def __str__(self):
        return f"{self.m:+d}"


@dataclass(frozen=True)
class Reset:
    """Set a counter to zero."""

    def apply(self, value: int) -> int:
        return 0

    def __str__(self):
        return "x0"


RESET = Reset()
Action = Union[Add, Reset]

_ACTION_RE = re.compile(r"^\s*([+-])\s*(\d+)\s*$")


def parse_action(text: str) -> Action:
    """Parse ``"+m"``, ``"-m"`` or ``"x0"`` (``"×0"`` is accepted too)."""
    if not isinstance(text, str):
        raise ValueError(f"action must be a string, got {text!r}")
    if text.strip() in ("x0", "×0", "*0"):
        return RESET
    match = _ACTION_RE.match(text)
    if not match:
        raise ValueError(f"malformed action {text!r}; expected '+m', '-m' or 'x0'")
    sign, digits = match.groups()
    value = int(digits)
    return Add(-value if sign == "-" else value)


def format_mask(mask: Sequence[int]) -> str:
    return "".join(str(bit) for bit in mask)


def parse_mask(text: str, k: int) -> Mask:
    if not isinstance(text, str) or len(text) != k or any(ch not in "01" for ch in text):
        raise ValueError(f"mask must be a string of {k} '0'/'1' characters, got {text!r}")
    return tuple(int(ch) for ch in text)


def all_masks(k: int) -> list:
    """Every mask of length ``k`` in lexicographic order."""
    return list(itertools.product((0, 1), repeat=k))


@dataclass(frozen=True)
class Configuration:
    state: int
    counters: tuple

    def __str__(self):
        # Counters first, then the state: ⟨c, q⟩.
        if len(self.counters) == 1:
            shown = str(self.counters[0])
        else:
            shown = "(" + ", ".join(str(c) for c in self.counters) + ")"
        return f"⟨{shown}, q{self.state}⟩"


@dataclass(frozen=True)
class CounterMachine:
    """A deterministic real-time k-counter machine.

    ``updates`` and ``transitions`` are keyed by ``(symbol, state, mask)``
    and must be total.  ``accept`` holds ``(state, mask)`` pairs.  When
    ``thresholds`` is given the machine is a threshold machine and mask bit
    ``i`` is 1 exactly when ``counters[i] <= thresholds[i]``.
    """

    alphabet: tuple
    num_states: int
    num_counters: int
    updates: Mapping = field(repr=False)
    transitions: Mapping = field(repr=False)
    accept: frozenset = field(repr=False)
    thresholds: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "updates", {k: tuple(v) for k, v in dict(self.updates).items()})
        object.__setattr__(self, "transitions", dict(self.transitions))
        object.__setattr__(self, "accept", frozenset((q, tuple(b)) for q, b in self.accept))
        if self.thresholds is not None:
            object.__setattr__(self, "thresholds", tuple(int(m) for m in self.thresholds))
        self._validate()

    __hash__ = None  # tables are dicts

    def _validate(self):
        if not self.alphabet:
            raise ContractError("alphabet must be non-empty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ContractError(f"alphabet has duplicate tokens: {self.alphabet!r}")
        for token in self.alphabet:
            if not isinstance(token, str) or not token:
                raise ContractError(f"tokens must be non-empty strings, got {token!r}")
        if not isinstance(self.num_states, int) or self.num_states < 1:
            raise ContractError("num_states must be a positive integer")
        if not isinstance(self.num_counters, int) or self.num_counters < 0:
            raise ContractError("num_counters must be a non-negative integer")
        k = self.num_counters
        if self.thresholds is not None and len(self.thresholds) != k:
            raise ContractError(f"thresholds has length {len(self.thresholds)}, expected {k}")

        domain = set(self.domain())
        for name, table in (("updates", self.updates), ("transitions", self.transitions)):
            keys = set(table)
            missing = domain - keys
            if missing:
                example = min(missing, key=repr)
                raise ContractError(
                    f"{name} table is not total: {len(missing)} missing entries, "
                    f"e.g. symbol={example[0]!r} state={example[1]} mask={format_mask(example[2])}"
                )
            extra = keys - domain
            if extra:
                raise ContractError(f"{name} table has entries outside the domain: {min(extra, key=repr)!r}")
        for key, actions in self.updates.items():
            if len(actions) != k:
                raise ContractError(f"update at {key!r} has {len(actions)} actions, expected {k}")
            for action in actions:
                if not isinstance(action, (Add, Reset)):
                    raise ContractError(f"update at {key!r} holds non-action {action!r}")
        for key, target in self.transitions.items():
            if not isinstance(target, int) or not 0 <= target < self.num_states:
                raise ContractError(f"transition at {key!r} leads to invalid state {target!r}")
        for q, b in self.accept:
            if not 0 <= q < self.num_states or len(b) != k or any(bit not in (0, 1) for bit in b):
                raise ContractError(f"malformed acceptance entry {(q, b)!r}")

    # -- construction -------------------------------------------------

    @classmethod
    def tabulate(
        cls,
        alphabet: Sequence[str],
        num_states: int,
        num_counters: int,
        update: Callable,
        transition: Callable,
        accept: Callable,
        thresholds: Optional[Sequence[int]] = None,
    ) -> "CounterMachine":
        """Build a machine by evaluating ``update(symbol, state, mask)``,
        ``transition(symbol, state, mask)`` and ``accept(state, mask)`` over
        the whole finite domain."""
        masks = all_masks(num_counters)
        updates, transitions = {}, {}
        for symbol in alphabet:
            for q in range(num_states):
                for b in masks:
                    updates[symbol, q, b] = tuple(update(symbol, q, b))
                    transitions[symbol, q, b] = transition(symbol, q, b)
        final = [(q, b) for q in range(num_states) for b in masks if accept(q, b)]
        return cls(tuple(alphabet), num_states, num_counters, updates, transitions, final,
                   None if thresholds is None else tuple(thresholds))

    @classmethod
    def from_moves(
        cls,
        alphabet: Sequence[str],
        num_states: int,
        num_counters: int,
        move: Callable,
        accept: Callable,
        thresholds: Optional[Sequence[int]] = None,
    ) -> "CounterMachine":
        """Like :meth:`tabulate`, with one ``move(symbol, state, mask)``
        returning ``(next_state, actions)``."""
        masks = all_masks(num_counters)
        updates, transitions = {}, {}
        for symbol in alphabet:
            for q in range(num_states):
                for b in masks:
                    nxt, actions = move(symbol, q, b)
                    updates[symbol, q, b] = tuple(actions)
                    transitions[symbol, q, b] = nxt
        final = [(q, b) for q in range(num_states) for b in masks if accept(q, b)]
        return cls(tuple(alphabet), num_states, num_counters, updates, transitions, final,
                   None if thresholds is None else tuple(thresholds))

    def domain(self) -> Iterable[Key]:
        masks = all_masks(self.num_counters)
        for symbol in self.alphabet:
            for q in range(self.num_states):
                for b in masks:
                    yield symbol, q, b

    # -- execution ----------------------------------------------------

    @property
    def is_threshold(self) -> bool:
        return self.thresholds is not None

    @cached_property
    def symbol_index(self) -> dict:
        return {s: i for i, s in enumerate(self.alphabet)}

    @cached_property
    def compiled(self) -> dict:
        """``(symbol, state, mask) -> (next_state, deltas)``; a delta of
        ``None`` means reset.  Used by the hot execution loops."""
        table = {}
        for key, actions in self.updates.items():
            deltas = tuple(None if isinstance(a, Reset) else a.m for a in actions)
            table[key] = (self.transitions[key], deltas)
        return table

    def initial(self) -> Configuration:
        return Configuration(0, (0,) * self.num_counters)

    def mask(self, counters: Sequence[int]) -> Mask:
        if self.thresholds is None:
            return tuple(0 if c == 0 else 1 for c in counters)
        return tuple(1 if c <= m else 0 for c, m in zip(counters, self.thresholds))

    def advance(self, state: int, counters: tuple, symbol: str):
        """Raw step on ``(state, counters)`` tuples; no alphabet check."""
        nxt, deltas = self.compiled[symbol, state, self.mask(counters)]
        new = []
        for c, d in zip(counters, deltas):
            v = 0 if d is None else c + d
            if not -COUNTER_LIMIT <= v <= COUNTER_LIMIT:
                raise OverflowError(f"counter value {v} leaves the signed 64-bit range")
            new.append(v)
        return nxt, tuple(new)

    def is_final(self, state: int, counters: Sequence[int]) -> bool:
        return (state, self.mask(counters)) in self.accept

    def max_update(self) -> int:
        """Largest ``|m|`` over all additive updates (0 if there are none)."""
        return max((abs(a.m) for acts in self.updates.values() for a in acts if isinstance(a, Add)),
                   default=0)


def as_tokens(machine_or_alphabet, x) -> list:
    """Turn ``x`` into a checked token list.

    A plain string is split into characters; any other sequence is taken as a
    list of tokens.
    """
    alphabet = machine_or_alphabet.alphabet if hasattr(machine_or_alphabet, "alphabet") else machine_or_alphabet
    tokens = list(x)
    known = set(alphabet)
    for pos, token in enumerate(tokens):
        if token not in known:
            raise InputError(f"unknown symbol {token!r} at position {pos}; alphabet is {list(alphabet)}")
    return tokens


def mask_of(machine: CounterMachine, counters: Sequence[int]) -> Mask:
    if len(counters) != machine.num_counters:
        raise ContractError(f"expected {machine.num_counters} counters, got {len(counters)}")
    return machine.mask(counters)


def step(machine: CounterMachine, config: Configuration, symbol: str) -> Configuration:
    if symbol not in machine.symbol_index:
        raise InputError(f"unknown symbol {symbol!r}; alphabet is {list(machine.alphabet)}")
    if not 0 <= config.state < machine.num_states:
        raise ContractError(f"state {config.state} out of range")
    if len(config.counters) != machine.num_counters:
        raise ContractError(f"expected {machine.num_counters} counters, got {len(config.counters)}")
    return Configuration(*machine.advance(config.state, tuple(config.counters), symbol))


def run_trace(machine: CounterMachine, x) -> list:
    """All configurations visited on ``x``, starting with ``<q0, 0>``."""
    tokens = as_tokens(machine, x)
    state, counters = 0, (0,) * machine.num_counters
    trace = [Configuration(state, counters)]
    for token in tokens:
        state, counters = machine.advance(state, counters, token)
        trace.append(Configuration(state, counters))
    return trace


def accepts(machine: CounterMachine, x) -> bool:
    """Real-time acceptance; the empty string is accepted iff the initial
    configuration is final."""
    tokens = as_tokens(machine, x)
    state, counters = 0, (0,) * machine.num_counters
    for token in tokens:
        state, counters = machine.advance(state, counters, token)
    return machine.is_final(state, counters)


@dataclass
class VariantReport:
    is_simplified: bool
    is_incremental: bool
    is_stateless: bool
    is_threshold: bool
    violations: dict = field(default_factory=dict)

    def flags(self) -> dict:
        return {
            "simplified": self.is_simplified,
            "incremental": self.is_incremental,
            "stateless": self.is_stateless,
            "threshold": self.is_threshold,
        }


def classify(machine: CounterMachine, max_witnesses: int = 5) -> VariantReport:
    """Check the machine's tables against each restricted variant.

    ``violations`` maps a variant name to example table entries that break it.
    """
    violations = {"simplified": [], "incremental": [], "stateless": [], "threshold": []}

    def unit(action):
        return isinstance(action, Reset) or abs(action.m) <= 1

    for key in sorted(machine.updates, key=lambda k: (machine.symbol_index[k[0]], k[1], k[2])):
        symbol, q, b = key
        actions = machine.updates[key]
        for i, action in enumerate(actions):
            if not unit(action):
                witness = f"u({symbol!r}, q{q}, {format_mask(b)})[{i}] = {action}"
                violations["incremental"].append(witness)
                violations["simplified"].append(witness)

    for symbol in machine.alphabet:
        reference_key = (symbol, 0, (0,) * machine.num_counters)
        reference = machine.updates[reference_key]
        for q in range(machine.num_states):
            for b in all_masks(machine.num_counters):
                actions = machine.updates[symbol, q, b]
                if actions != reference:
                    violations["simplified"].append(
                        f"u({symbol!r}, q{q}, {format_mask(b)}) = {_fmt_actions(actions)} differs from "
                        f"u({symbol!r}, q0, {format_mask(reference_key[2])}) = {_fmt_actions(reference)}"
                    )
    if machine.num_states != 1:
        violations["stateless"].append(f"machine has {machine.num_states} states")
    if machine.thresholds is None:
        violations["threshold"].append("no threshold profile")

    trimmed = {name: found[:max_witnesses] for name, found in violations.items() if found}
    return VariantReport(
        is_simplified=not violations["simplified"],
        is_incremental=not violations["incremental"],
        is_stateless=not violations["stateless"],
        is_threshold=not violations["threshold"],
        violations=trimmed,
    )


def _fmt_actions(actions) -> str:
    return "⟨" + ", ".join(str(a) for a in actions) + "⟩"
