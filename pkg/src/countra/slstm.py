"""Saturated LSTMs: LSTM cells whose activations are step functions.

With ``pos(v) = 1 if v > 0 else 0`` and ``sgn(v) = 1 if v > 0 else -1``::

    f = pos(Wf x + Uf h)      i = pos(Wi x + Ui h)      o = pos(Wo x + Uo h)
    c~ = sgn(Wc x + Uc h)     c = f * c + i * c~        h = o * c
    y = pos(wy . h + by)

All arithmetic is exact: values are ``fractions.Fraction``, or plain ``int``
where the value is integral, so there is no rounding at the step boundaries.  A network accepts a string when ``y`` computed from the
final state is 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .errors import ContractError, InputError, MachineFormatError

GATES = ("f", "i", "o", "c")


def positive(v) -> int:
    return 1 if v > 0 else 0


def sgn(v) -> int:
    return 1 if v > 0 else -1


def _exact(v):
    v = Fraction(v)
    # Integral values as ints keep integer networks on fast int arithmetic.
    return v.numerator if v.denominator == 1 else v


def _vec(values) -> tuple:
    return tuple(_exact(v) for v in values)


def _mat(rows) -> tuple:
    return tuple(_vec(row) for row in rows)


def _sparse(rows) -> tuple:
    return tuple(tuple((j, w) for j, w in enumerate(row) if w) for row in rows)


def _affine(W, x, U, h) -> list:
    return [sum(w * x[j] for j, w in wr) + sum(u * h[j] for j, u in ur) for wr, ur in zip(W, U)]


@dataclass(frozen=True)
class SaturatedLstm:
    embeddings: Mapping
    W: Mapping      # gate name -> hidden x input matrix
    U: Mapping      # gate name -> hidden x hidden matrix
    w_y: tuple
    b_y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "embeddings", {s: _vec(v) for s, v in dict(self.embeddings).items()})
        object.__setattr__(self, "W", {g: _mat(self.W[g]) for g in GATES})
        object.__setattr__(self, "U", {g: _mat(self.U[g]) for g in GATES})
        object.__setattr__(self, "w_y", _vec(self.w_y))
        object.__setattr__(self, "b_y", _exact(self.b_y))
        d, h = self.input_dim, self.hidden_dim
        if not self.embeddings:
            raise ContractError("network needs at least one symbol embedding")
        for s, v in self.embeddings.items():
            if len(v) != d:
                raise ContractError(f"embedding of {s!r} has length {len(v)}, expected {d}")
        for g in GATES:
            if len(self.W[g]) != h or any(len(r) != d for r in self.W[g]):
                raise ContractError(f"W_{g} must be {h} x {d}")
            if len(self.U[g]) != h or any(len(r) != h for r in self.U[g]):
                raise ContractError(f"U_{g} must be {h} x {h}")
        object.__setattr__(self, "_rows", {g: (_sparse(self.W[g]), _sparse(self.U[g])) for g in GATES})

    __hash__ = None

    @property
    def input_dim(self) -> int:
        return len(next(iter(self.embeddings.values())))

    @property
    def hidden_dim(self) -> int:
        return len(self.w_y)

    @property
    def alphabet(self) -> tuple:
        return tuple(self.embeddings)

    def zero_state(self) -> "LstmState":
        zero = (0,) * self.hidden_dim
        return LstmState(zero, zero)


@dataclass(frozen=True)
class LstmState:
    c: tuple
    h: tuple

    def __str__(self):
        fmt = lambda v: "⟨" + ", ".join(str(x) for x in v) + "⟩"
        return f"c={fmt(self.c)} h={fmt(self.h)}"


def lstm_gates(net: SaturatedLstm, state: LstmState, symbol) -> dict:
    """Gate vectors ``f``, ``i``, ``o`` and candidate ``c~`` for one step."""
    try:
        x = net.embeddings[symbol]
    except KeyError:
        raise InputError(f"no embedding for symbol {symbol!r}; known symbols are {list(net.embeddings)}") from None
    gates = {}
    for g in GATES:
        W, U = net._rows[g]
        squash = sgn if g == "c" else positive
        gates[g] = tuple(squash(v) for v in _affine(W, x, U, state.h))
    return gates


def lstm_step(net: SaturatedLstm, state: LstmState, symbol) -> LstmState:
    g = lstm_gates(net, state, symbol)
    c = tuple(f * cp + i * ct for f, cp, i, ct in zip(g["f"], state.c, g["i"], g["c"]))
    h = tuple(o * v for o, v in zip(g["o"], c))
    return LstmState(c, h)


def lstm_output(net: SaturatedLstm, state: LstmState) -> int:
    return positive(sum(w * v for w, v in zip(net.w_y, state.h)) + net.b_y)


def lstm_run(net: SaturatedLstm, x) -> list:
    """States from the zero state through every token of ``x``."""
    state = net.zero_state()
    trace = [state]
    for symbol in x:
        state = lstm_step(net, state, symbol)
        trace.append(state)
    return trace


def lstm_accepts(net: SaturatedLstm, x) -> bool:
    return lstm_output(net, lstm_run(net, x)[-1]) == 1


def counting_lstm() -> SaturatedLstm:
    """A hand-built network accepting exactly ``{a^n b^n}``.

    Input embedding is ``(1, [a], [b])``.  Cells:

    0. ``D = #a - #b``, always exposed (``o = 1``).
    1. ``D`` again, exposed only when ``D > 0``.  The output gate sees the
       previous ``h_0`` plus the current token, which is exactly the new ``D``.
    2. ``D`` again, exposed only when ``D < 0``.
    3. number of a's read after some b (order violations).
    4. 1 once any b has been read.

    The output is ``pos(1 - h_1 + h_2 - h_3) = pos(1 - |D| - violations)``,
    i.e. 1 iff ``D = 0`` and no ``a`` followed a ``b``.  Cell 0 is the counter:
    it equals ``i - j`` after ``a^i b^j``.
    """
    bias, up = (1, 0, 0), (0, 1, -1)
    zeros5 = (0, 0, 0, 0, 0)

    def with_h(index, coeff):
        row = [0] * 5
        row[index] = coeff
        return tuple(row)

    W = {
        "f": (bias, bias, bias, bias, (0, 1, 0)),
        "i": (bias, bias, bias, (-1, 1, -1), (0, 0, 1)),
        "o": (bias, (0, 1, -1), (0, -1, 1), bias, bias),
        "c": (up, up, up, bias, bias),
    }
    U = {
        "f": (zeros5,) * 5,
        "i": (zeros5, zeros5, zeros5, with_h(4, 1), zeros5),
        "o": (zeros5, with_h(0, 1), with_h(0, -1), zeros5, zeros5),
        "c": (zeros5,) * 5,
    }
    return SaturatedLstm({"a": (1, 1, 0), "b": (1, 0, 1)}, W, U, (0, -1, 1, -1, 0), 1)


# -- weight files ------------------------------------------------------------

def _enc(v) -> list:
    return [v.numerator, v.denominator]


def net_to_dict(net: SaturatedLstm) -> dict:
    data = {
        "input_dim": net.input_dim,
        "hidden_dim": net.hidden_dim,
        "embeddings": {s: [_enc(v) for v in vec] for s, vec in net.embeddings.items()},
    }
    for g in GATES:
        data[f"W_{g}"] = [[_enc(v) for v in row] for row in net.W[g]]
        data[f"U_{g}"] = [[_enc(v) for v in row] for row in net.U[g]]
    data["w_y"] = [_enc(v) for v in net.w_y]
    data["b_y"] = _enc(net.b_y)
    return data


def _dec(value, where) -> Fraction:
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)):
        raise MachineFormatError(f"expected a [numerator, denominator] pair of integers, got {value!r}", where)
    if value[1] == 0:
        raise MachineFormatError("zero denominator", where)
    return Fraction(value[0], value[1])


def _dec_vec(values, n, where) -> tuple:
    if not isinstance(values, list) or len(values) != n:
        raise MachineFormatError(f"expected a list of {n} rationals", where)
    return tuple(_dec(v, f"{where}[{j}]") for j, v in enumerate(values))


def _dec_mat(rows, n_rows, n_cols, where) -> tuple:
    if not isinstance(rows, list) or len(rows) != n_rows:
        raise MachineFormatError(f"expected {n_rows} rows", where)
    return tuple(_dec_vec(r, n_cols, f"{where}[{j}]") for j, r in enumerate(rows))


def net_from_dict(data) -> SaturatedLstm:
    if not isinstance(data, dict):
        raise MachineFormatError("top level must be an object")
    for name in ("input_dim", "hidden_dim", "embeddings", "w_y", "b_y"):
        if name not in data:
            raise MachineFormatError(f"missing field {name!r}")
    d, h = data["input_dim"], data["hidden_dim"]
    for name, v in (("input_dim", d), ("hidden_dim", h)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise MachineFormatError("must be a positive integer", name)
    if not isinstance(data["embeddings"], dict) or not data["embeddings"]:
        raise MachineFormatError("must map symbols to vectors", "embeddings")
    emb = {s: _dec_vec(v, d, f"embeddings.{s}") for s, v in data["embeddings"].items()}
    W, U = {}, {}
    for g in GATES:
        for prefix, target, cols in (("W", W, d), ("U", U, h)):
            key = f"{prefix}_{g}"
            if key not in data:
                raise MachineFormatError(f"missing field {key!r}")
            target[g] = _dec_mat(data[key], h, cols, key)
    return SaturatedLstm(emb, W, U, _dec_vec(data["w_y"], h, "w_y"), _dec(data["b_y"], "b_y"))


def save_weights(net: SaturatedLstm, path) -> None:
    Path(path).write_text(json.dumps(net_to_dict(net), ensure_ascii=False) + "\n", encoding="utf-8")


def load_weights(path) -> SaturatedLstm:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MachineFormatError(f"cannot read weight file: {exc.strerror}", str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MachineFormatError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return net_from_dict(data)
