"""Seeded random machines for differential testing."""

from __future__ import annotations

import random
from typing import Sequence

from .machine import RESET, Add, CounterMachine, all_masks


def random_machine(
    rng: random.Random,
    alphabet: Sequence[str] = ("a", "b"),
    num_states: int = 2,
    num_counters: int = 1,
    max_update: int = 1,
    reset_prob: float = 0.1,
    accept_prob: float = 0.3,
) -> CounterMachine:
    """A general machine with uniformly random tables.

    Updates are ``Add(m)`` with ``|m| <= max_update`` or, with probability
    ``reset_prob``, a reset.
    """

    def action():
        if rng.random() < reset_prob:
            return RESET
        return Add(rng.randint(-max_update, max_update))

    masks = all_masks(num_counters)
    updates, transitions = {}, {}
    for s in alphabet:
        for q in range(num_states):
            for b in masks:
                updates[s, q, b] = tuple(action() for _ in range(num_counters))
                transitions[s, q, b] = rng.randrange(num_states)
    accept = [(q, b) for q in range(num_states) for b in masks if rng.random() < accept_prob]
    return CounterMachine(tuple(alphabet), num_states, num_counters, updates, transitions, accept)


def random_qscl_machine(
    rng: random.Random,
    alphabet: Sequence[str] = ("a", "b"),
    num_counters: int = 1,
    reset_prob: float = 0.15,
    accept_prob: float = 0.4,
) -> CounterMachine:
    """A random stateless simplified machine: one update vector per symbol,
    entries in ``{-1, +0, +1, x0}``."""
    per_symbol = {
        s: tuple(RESET if rng.random() < reset_prob else Add(rng.choice((-1, 0, 1)))
                 for _ in range(num_counters))
        for s in alphabet
    }
    masks = all_masks(num_counters)
    accept = {b for b in masks if rng.random() < accept_prob}
    return CounterMachine.tabulate(alphabet, 1, num_counters, lambda s, q, b: per_symbol[s],
                                   lambda *_: 0, lambda q, b: b in accept)
