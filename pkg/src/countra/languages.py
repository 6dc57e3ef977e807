"""Example machines, prefix-expression languages and boolean evaluation.

``L_m`` is the language of prefix (Polish) expressions whose operators have
arity at most ``m``.  A single counter tracking "arguments still owed" is
enough to recognise it, but no counter machine can *evaluate* boolean
expressions: the census at the bottom of this module counts how many
configurations a machine reaches after ``p`` operators against how many
distinct boolean functions those operators denote.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .enumeration import budget
from .errors import BudgetExceededError, ContractError, InputError, MachineFormatError
from .machine import RESET, Add, CounterMachine

AND_TOKEN = "∧"
OR_TOKEN = "∨"
NOT_TOKEN = "¬"


# -- example machines ------------------------------------------------------

def fig1_machine() -> CounterMachine:
    """The three-state machine for ``{a^n b^n}``.

    ``q0`` counts a's up, ``b`` moves to ``q1`` counting down, and an ``a``
    after a ``b`` parks the machine in the sink ``q2``.  Accepts when the
    counter is zero in ``q0`` or ``q1``.
    """
    moves = {
        ("a", 0): (0, +1), ("b", 0): (1, -1),
        ("a", 1): (2, 0), ("b", 1): (1, -1),
        ("a", 2): (2, 0), ("b", 2): (2, 0),
    }
    return CounterMachine.tabulate(
        ("a", "b"), 3, 1,
        lambda s, q, b: [Add(moves[s, q][1])],
        lambda s, q, b: moves[s, q][0],
        lambda q, b: q in (0, 1) and b == (0,),
    )


def amb2m_machine() -> CounterMachine:
    """``{a^m b^(2m)}`` with one counter: +2 per ``a``, -1 per ``b``.

    ``q1`` is entered on the first ``b``; an ``a`` there goes to the sink
    ``q2``.
    """
    moves = {
        ("a", 0): (0, +2), ("b", 0): (1, -1),
        ("a", 1): (2, 0), ("b", 1): (1, -1),
        ("a", 2): (2, 0), ("b", 2): (2, 0),
    }
    return CounterMachine.tabulate(
        ("a", "b"), 3, 1,
        lambda s, q, b: [Add(moves[s, q][1])],
        lambda s, q, b: moves[s, q][0],
        lambda q, b: q in (0, 1) and b == (0,),
    )


def amb2m_incremental_machine() -> CounterMachine:
    """``{a^m b^(2m)}`` with two +-1 counters, updates depending on state.

    In ``q0`` each ``a`` increments ``c1``; each ``b`` moves one unit from
    ``c1`` to ``c2``.  Once ``c1`` is empty and ``c2`` is not, the next ``b``
    switches to ``q1``, where b's drain ``c2``.  ``q2`` is a rejecting sink
    for out-of-order input.
    """
    SINK = 2

    def plan(symbol, q, mask):
        c1_zero, c2_zero = mask[0] == 0, mask[1] == 0
        if q == SINK:
            return SINK, (0, 0)
        if q == 0:
            if symbol == "a":
                return (0, (+1, 0)) if c2_zero else (SINK, (0, 0))
            if not c1_zero:
                return 0, (-1, +1)
            if not c2_zero:
                return 1, (0, -1)
            return SINK, (0, 0)
        # q1
        if symbol == "a" or c2_zero:
            return SINK, (0, 0)
        return 1, (0, -1)

    return CounterMachine.tabulate(
        ("a", "b"), 3, 2,
        lambda s, q, b: [Add(d) for d in plan(s, q, b)[1]],
        lambda s, q, b: plan(s, q, b)[0],
        lambda q, b: q in (0, 1) and b == (0, 0),
    )


def dyck1_machine(open_token: str = "(", close_token: str = ")") -> CounterMachine:
    """Balanced brackets: count depth, and fall into a sink on a closing
    bracket at depth zero."""

    def plan(symbol, q, mask):
        if q == 1:
            return 1, 0
        if symbol == open_token:
            return 0, +1
        return (1, 0) if mask == (0,) else (0, -1)

    return CounterMachine.tabulate(
        (open_token, close_token), 2, 1,
        lambda s, q, b: [Add(plan(s, q, b)[1])],
        lambda s, q, b: plan(s, q, b)[0],
        lambda q, b: q == 0 and b == (0,),
    )


def parity_machine(alphabet: Sequence[str] = ("a", "b")) -> CounterMachine:
    """Strings of even length; no counters."""
    return CounterMachine.tabulate(alphabet, 2, 0, lambda *_: [], lambda s, q, b: 1 - q,
                                   lambda q, b: q == 0)


def threshold_machine(m: int, alphabet: Sequence[str] = ("a", "b")) -> CounterMachine:
    """``#a(x) - #b(x) <= m`` with a single threshold check.

    Any symbol other than the first two leaves the counter unchanged.
    """
    deltas = {alphabet[0]: +1, alphabet[1]: -1}
    return CounterMachine.tabulate(
        alphabet, 1, 1,
        lambda s, q, b: [Add(deltas.get(s, 0))],
        lambda *_: 0,
        lambda q, b: b == (1,),
        thresholds=(m,),
    )


def scl_machine(update_by_symbol: Mapping, accept_masks=((0,),)) -> CounterMachine:
    """A stateless simplified machine with the given per-symbol updates.

    ``update_by_symbol`` maps each token to a sequence of actions (ints or
    ``"x0"``); by default the machine accepts when every counter is zero.
    """
    alphabet = tuple(update_by_symbol)
    table = {}
    for s, acts in update_by_symbol.items():
        table[s] = tuple(RESET if a in ("x0", RESET) else Add(int(a)) for a in acts)
    k = len(next(iter(table.values())))
    accept_masks = {tuple(b) for b in accept_masks}
    return CounterMachine.tabulate(alphabet, 1, k, lambda s, q, b: table[s], lambda *_: 0,
                                   lambda q, b: b in accept_masks)


def scl_counter_decomposition(u_a: int, u_b: int, m: int, l: int) -> int:
    """Counter value of a reset-free simplified machine after ``a^m b^l``."""
    return m * u_a + l * u_b


# -- L_m grammars -----------------------------------------------------------

@dataclass(frozen=True)
class GrammarLm:
    """Token inventory for a prefix-expression language; values have arity 0."""

    arities: Mapping = field(hash=False)

    def __post_init__(self):
        arities = dict(self.arities)
        if not arities:
            raise ContractError("grammar inventory is empty")
        for token, arity in arities.items():
            if not isinstance(token, str) or not token:
                raise ContractError(f"tokens must be non-empty strings, got {token!r}")
            if not isinstance(arity, int) or isinstance(arity, bool) or arity < 0:
                raise ContractError(f"arity of {token!r} must be a non-negative integer")
        if 0 not in arities.values():
            raise ContractError("grammar needs at least one value (arity-0 token)")
        object.__setattr__(self, "arities", arities)

    @property
    def max_arity(self) -> int:
        return max(self.arities.values())

    @property
    def alphabet(self) -> tuple:
        return tuple(self.arities)

    def arity(self, token) -> int:
        try:
            return self.arities[token]
        except KeyError:
            raise InputError(f"unknown token {token!r}; inventory is {list(self.arities)}") from None

    @classmethod
    def load(cls, path) -> "GrammarLm":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise MachineFormatError(f"cannot read grammar file: {exc.strerror}", str(path)) from None
        except json.JSONDecodeError as exc:
            raise MachineFormatError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
        if not isinstance(data, dict):
            raise MachineFormatError("grammar file must map token -> arity")
        try:
            return cls(data)
        except ContractError as exc:
            raise MachineFormatError(str(exc)) from None


L1 = GrammarLm({"0": 0, "1": 0, NOT_TOKEN: 1})
L2 = BOOL = GrammarLm({"0": 0, "1": 0, AND_TOKEN: 2, OR_TOKEN: 2})
L3 = GrammarLm({"0": 0, NOT_TOKEN: 1, AND_TOKEN: 2, "?": 3})


def lm_trace(grammar: GrammarLm, tokens) -> list:
    """Counter values after each token (the initial 0 not included)."""
    c, out = 0, []
    for token in tokens:
        c += grammar.arity(token) - 1
        out.append(c)
    return out


def lm_decide(grammar: GrammarLm, tokens, guarded: bool = False) -> bool:
    """Sum ``arity - 1`` over the tokens and accept iff the total is -1.

    With ``guarded=False`` this is the bare final-sum test, which also accepts
    strings such as ``0 ¬`` that are not expressions.  ``guarded=True``
    additionally rejects once the sum reaches -1 before the last token,
    which is what makes the test exact.
    """
    tokens = list(tokens)
    c = 0
    for t, token in enumerate(tokens):
        c += grammar.arity(token) - 1
        if guarded and c == -1 and t != len(tokens) - 1:
            return False
    return c == -1


def grammar_accepts(grammar: GrammarLm, tokens) -> bool:
    """Recursive-descent recogniser for ``exp -> OP_k exp^k``."""
    tokens = list(tokens)
    for token in tokens:
        grammar.arity(token)

    def expression(pos):
        # Index just past one complete expression starting at pos, or None.
        if pos >= len(tokens):
            return None
        pos_next = pos + 1
        for _ in range(grammar.arities[tokens[pos]]):
            pos_next = expression(pos_next)
            if pos_next is None:
                return None
        return pos_next

    return expression(0) == len(tokens)


def lm_machine(grammar: GrammarLm, guarded: bool = False) -> CounterMachine:
    """One-counter machine computing :func:`lm_decide`.

    The counter holds ``c + 1`` so that the final test ``c = -1`` becomes a
    zero-check.  State 0 means nothing has been read yet (the first token
    adds its full arity, absorbing the +1 offset), state 1 is the running
    state, and with ``guarded`` state 2 is a sink entered when a token
    arrives after a complete expression.
    """
    INIT, RUN, SINK = 0, 1, 2

    def plan(token, q, mask):
        arity = grammar.arities[token]
        if q == INIT:
            return RUN, arity
        if q == SINK or (guarded and mask == (0,)):
            return SINK, 0
        return RUN, arity - 1

    return CounterMachine.tabulate(
        grammar.alphabet, 3 if guarded else 2, 1,
        lambda s, q, b: [Add(plan(s, q, b)[1])],
        lambda s, q, b: plan(s, q, b)[0],
        lambda q, b: q == RUN and b == (0,),
    )


# -- boolean semantics ------------------------------------------------------

_OPS = {AND_TOKEN: lambda p, q: p & q, OR_TOKEN: lambda p, q: p | q}


def bool_eval(tokens) -> int:
    """Value of a prefix boolean expression over ``0 1 ∧ ∨``."""
    tokens = list(tokens)
    if not lm_decide(BOOL, tokens, guarded=True):
        raise SyntaxError(f"not a well-formed expression: {' '.join(tokens)!r}")
    stack = []
    for token in reversed(tokens):
        if token in _OPS:
            left = stack.pop()
            right = stack.pop()
            stack.append(_OPS[token](left, right))
        else:
            stack.append(int(token))
    return stack[0]


@dataclass(frozen=True)
class PrefixFunction:
    """The ``arity``-ary boolean function denoted by an operator prefix.

    ``bits`` is the truth table packed into an int: bit ``a`` is the output
    when the ``j``-th argument equals bit ``j`` of ``a``.
    """

    arity: int
    bits: int

    def __call__(self, *args) -> int:
        if len(args) != self.arity:
            raise ContractError(f"expected {self.arity} arguments, got {len(args)}")
        index = sum((1 if v else 0) << j for j, v in enumerate(args))
        return (self.bits >> index) & 1

    def table(self) -> tuple:
        return tuple((self.bits >> a) & 1 for a in range(2 ** self.arity))


@functools.lru_cache(maxsize=None)
def _variable_masks(n: int) -> tuple:
    # Truth table of v_j: blocks of 2^j zeros then 2^j ones, repeated.
    size = 2 ** n
    out = []
    for j in range(n):
        block = ((1 << (1 << j)) - 1) << (1 << j)
        pattern, width = block, 1 << (j + 1)
        while width < size:
            pattern |= pattern << width
            width *= 2
        out.append(pattern)
    return tuple(out)


def _check_ops(ops):
    ops = list(ops)
    for op in ops:
        if op not in _OPS:
            raise InputError(f"prefix must consist of {AND_TOKEN!r}/{OR_TOKEN!r}, got {op!r}")
    return ops


def prefix_function(ops) -> PrefixFunction:
    """Compose the operators: ``o1 o2 ... op`` denotes
    ``o1(o2(...op(v0, v1)..., v_(p-1)), v_p)``."""
    ops = _check_ops(ops)
    masks = _variable_masks(len(ops) + 1)
    f = masks[0]
    for j, op in enumerate(reversed(ops), start=1):
        f = _OPS[op](f, masks[j])
    return PrefixFunction(len(ops) + 1, f)


def prefix_function_by_eval(ops) -> PrefixFunction:
    """Slow reference: append every value suffix and evaluate."""
    ops = _check_ops(ops)
    n = len(ops) + 1
    bits = 0
    for a in range(2 ** n):
        suffix = [str((a >> j) & 1) for j in range(n)]
        bits |= bool_eval(ops + suffix) << a
    return PrefixFunction(n, bits)


# -- configuration census ----------------------------------------------------

DEFAULT_CENSUS_MAX_P = 12


@dataclass
class CensusRow:
    p: int
    prefixes: int
    reachable_configs: int
    distinct_functions: int


@dataclass
class CensusReport:
    rows: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"rows": [vars(r).copy() for r in self.rows]}

    def format_table(self) -> str:
        header = ("p", "prefixes", "reachable_configs", "distinct_functions")
        lines = [header] + [(str(r.p), str(r.prefixes), str(r.reachable_configs), str(r.distinct_functions))
                            for r in self.rows]
        widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
        return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(line, widths)) for line in lines)


def config_census(machine: CounterMachine, max_p: int, limit: int | None = None) -> CensusReport:
    """For each ``p <= max_p``, run ``machine`` on all ``2^p`` operator
    prefixes and count distinct configurations and distinct denoted
    functions.

    Raises :class:`BudgetExceededError` carrying the rows finished so far if
    the total number of prefixes would exceed the budget.
    """
    if not {AND_TOKEN, OR_TOKEN} <= set(machine.alphabet):
        raise ContractError(f"census machine must read {AND_TOKEN!r} and {OR_TOKEN!r}")
    limit = budget(2 ** (DEFAULT_CENSUS_MAX_P + 1) - 1) if limit is None else limit
    report = CensusReport()
    level = [((0, (0,) * machine.num_counters), ())]
    spent = 0
    for p in range(max_p + 1):
        spent += len(level)
        if spent > limit:
            raise BudgetExceededError(
                f"census up to p={max_p} exceeds the budget of {limit} prefixes; stopped at p={p - 1}",
                partial=report)
        configs = {cfg for cfg, _ in level}
        functions = {prefix_function(ops).bits for _, ops in level}
        report.rows.append(CensusRow(p, len(level), len(configs), len(functions)))
        if p == max_p:
            break
        level = [(machine.advance(*cfg, op), ops + (op,)) for cfg, ops in level
                 for op in (AND_TOKEN, OR_TOKEN)]
    return report
