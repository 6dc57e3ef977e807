"""Parikh vectors, linear sets, and the decomposition of stateless simplified
machines into linear suffix conditions.

For a single-state machine whose updates depend only on the input symbol,
counter ``i`` after reading ``x`` equals ``u_i . Psi(s)`` where ``s`` is the
suffix of ``x`` after the last token that resets counter ``i`` (or all of
``x`` if there is none) and ``u_i`` lists the per-symbol increments.  An
accepting mask then becomes a conjunction of "equals zero" / "nonzero"
conditions on such dot products.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .enumeration import DiffReport, difftest_predicate
from .errors import UnsupportedVariantError
from .machine import Add, CounterMachine, Reset, as_tokens, classify, format_mask


def parikh(alphabet: Sequence[str], x) -> tuple:
    """Occurrence count of each alphabet token, in alphabet order."""
    index = {s: i for i, s in enumerate(alphabet)}
    counts = [0] * len(alphabet)
    for token in as_tokens(alphabet, x):
        counts[index[token]] += 1
    return tuple(counts)


@dataclass(frozen=True)
class LinearConstraintSet:
    """``{n : W n + b = 0}`` over vectors indexed like the alphabet.

    Coefficients may be negative.
    """

    coeffs: tuple
    offset: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(tuple(row) for row in self.coeffs))
        object.__setattr__(self, "offset", tuple(self.offset))
        if len(self.coeffs) != len(self.offset):
            raise ValueError("coeffs and offset must have the same number of rows")
        widths = {len(row) for row in self.coeffs}
        if len(widths) > 1:
            raise ValueError("all rows of coeffs must have the same length")

    def contains(self, n: Sequence[int]) -> bool:
        return all(sum(w * v for w, v in zip(row, n)) + b == 0
                   for row, b in zip(self.coeffs, self.offset))


@dataclass(frozen=True)
class SemilinearSet:
    """A finite union of linear sets."""

    components: tuple = ()

    def contains(self, n: Sequence[int]) -> bool:
        return any(c.contains(n) for c in self.components)


@dataclass(frozen=True)
class CounterCondition:
    """Condition on one counter: ``u . Psi(suffix) = target`` (or ``!=``
    when ``nonzero``), the suffix starting after the last reset token."""

    counter: int
    u: tuple
    resets: frozenset
    target: int = 0
    nonzero: bool = False

    def suffix_value(self, alphabet, tokens) -> int:
        start = 0
        for t, token in enumerate(tokens):
            if token in self.resets:
                start = t + 1
        counts = parikh(alphabet, tokens[start:])
        return sum(w * n for w, n in zip(self.u, counts))

    def holds(self, alphabet, tokens) -> bool:
        hit = self.suffix_value(alphabet, tokens) == self.target
        return not hit if self.nonzero else hit

    def suffix_constraint(self) -> LinearConstraintSet:
        return LinearConstraintSet((self.u,), (-self.target,))

    def describe(self, alphabet) -> str:
        u = "⟨" + ", ".join(str(v) for v in self.u) + "⟩"
        z = "∅" if not self.resets else "{" + ", ".join(s for s in alphabet if s in self.resets) + "}"
        relation = "≠" if self.nonzero else "="
        return f"counter {self.counter}: u = {u}, Z = {z}, target {relation} {self.target}"


@dataclass(frozen=True)
class AcceptingComponent:
    mask: tuple
    conditions: tuple

    def holds(self, alphabet, tokens) -> bool:
        return all(c.holds(alphabet, tokens) for c in self.conditions)


@dataclass
class QsclDecomposition:
    alphabet: tuple
    updates: tuple          # u_i per counter
    resets: tuple           # Z_i per counter
    components: list = field(default_factory=list)

    def parikh_set(self):
        """The language's Parikh image as a :class:`SemilinearSet`, when it is
        a plain union of equalities (no resets, only all-zero masks);
        otherwise ``None``."""
        if any(self.resets) or any(c.nonzero for comp in self.components for c in comp.conditions):
            return None
        parts = []
        for comp in self.components:
            rows = tuple(c.u for c in comp.conditions)
            parts.append(LinearConstraintSet(rows, tuple(-c.target for c in comp.conditions)))
        return SemilinearSet(tuple(parts))

    def describe(self) -> str:
        if not self.components:
            return "∅ (no accepting masks)"
        lines = []
        for comp in self.components:
            lines.append(f"mask {format_mask(comp.mask) or '(empty)'}:")
            if not comp.conditions:
                lines.append("  Σ* (no counters)")
            for c in comp.conditions:
                lines.append("  " + c.describe(self.alphabet))
                if c.resets:
                    z = "{" + ", ".join(s for s in self.alphabet if s in c.resets) + "}"
                    lines.append(f"    Σ* · {z} · L  ∪  (Σ ∖ {z})* ∩ L,  L = {{x : u·Ψ(x) {'≠' if c.nonzero else '='} {c.target}}}")
                else:
                    lines.append(f"    {{x : u·Ψ(x) {'≠' if c.nonzero else '='} {c.target}}}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "alphabet": list(self.alphabet),
            "components": [
                {
                    "mask": format_mask(comp.mask),
                    "conditions": [
                        {"counter": c.counter, "u": list(c.u),
                         "Z": [s for s in self.alphabet if s in c.resets],
                         "target": c.target, "relation": "!=" if c.nonzero else "="}
                        for c in comp.conditions
                    ],
                }
                for comp in self.components
            ],
        }


def decompose_qscl(machine: CounterMachine) -> QsclDecomposition:
    """Read off ``u_i`` and ``Z_i`` for every counter and one component per
    accepting mask.

    Raises :class:`UnsupportedVariantError` unless the machine is both
    simplified and stateless (and not a threshold machine).
    """
    report = classify(machine)
    problems = []
    if machine.thresholds is not None:
        problems.append("machine uses threshold checks")
    for variant, ok in (("simplified", report.is_simplified), ("stateless", report.is_stateless)):
        if not ok:
            problems.append(f"not {variant}: {report.violations[variant][0]}")
    if problems:
        raise UnsupportedVariantError("decomposition needs a stateless simplified machine; " + "; ".join(problems))

    k = machine.num_counters
    zero = (0,) * k
    per_symbol = {s: machine.updates[s, 0, zero] for s in machine.alphabet}
    updates, resets = [], []
    for i in range(k):
        updates.append(tuple(per_symbol[s][i].m if isinstance(per_symbol[s][i], Add) else 0
                             for s in machine.alphabet))
        resets.append(frozenset(s for s in machine.alphabet if isinstance(per_symbol[s][i], Reset)))

    decomposition = QsclDecomposition(tuple(machine.alphabet), tuple(updates), tuple(resets))
    for _, mask in sorted(machine.accept):
        conditions = tuple(CounterCondition(i, updates[i], resets[i], 0, bool(mask[i])) for i in range(k))
        decomposition.components.append(AcceptingComponent(mask, conditions))
    return decomposition


def semilinear_member(decomposition: QsclDecomposition, x) -> bool:
    tokens = as_tokens(decomposition.alphabet, x)
    return any(comp.holds(decomposition.alphabet, tokens) for comp in decomposition.components)


def verify_decomposition(machine: CounterMachine, max_len: int) -> DiffReport:
    """Check the decomposition against direct simulation on every string of
    length <= ``max_len`` (side ``a`` is the machine)."""
    decomposition = decompose_qscl(machine)
    return difftest_predicate(machine, lambda x: semilinear_member(decomposition, x), max_len)
