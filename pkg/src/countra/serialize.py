"""JSON machine files.

Layout::

    {
      "alphabet": ["a", "b"],
      "num_states": 3,
      "num_counters": 1,
      "updates": [
        {"symbol": "a", "state": 0, "mask": "0", "actions": ["+1"]},
        {"symbol": "b", "actions": ["+0"]}
      ],
      "transitions": [
        {"symbol": "a", "state": 0, "mask": "0", "next": 0}
      ],
      "accept": [{"state": 0, "mask": "0"}],
      "thresholds": [3]
    }

A record may leave out ``symbol``, ``state`` or ``mask``; it then acts as a
default for every domain point it matches that no more specific record
covers.  After defaults are applied the tables must be total.
"""

from __future__ import annotations

import json
from collections import Counter
from pathlib import Path

from .errors import ContractError, MachineFormatError
from .machine import CounterMachine, all_masks, format_mask, parse_action, parse_mask

_KEY_FIELDS = ("symbol", "state", "mask")


def machine_to_dict(machine: CounterMachine, compact: bool = True) -> dict:
    """Serialize to plain data.

    With ``compact`` each symbol gets a default record holding its most
    common value, and only the exceptions are listed explicitly.
    """
    data = {
        "alphabet": list(machine.alphabet),
        "num_states": machine.num_states,
        "num_counters": machine.num_counters,
        "updates": _table_records(machine, machine.updates, "actions",
                                  lambda acts: [str(a) for a in acts], compact),
        "transitions": _table_records(machine, machine.transitions, "next", lambda q: q, compact),
        "accept": [{"state": q, "mask": format_mask(b)} for q, b in sorted(machine.accept)],
    }
    if machine.thresholds is not None:
        data["thresholds"] = list(machine.thresholds)
    return data


def _table_records(machine, table, value_field, encode, compact):
    records = []
    masks = all_masks(machine.num_counters)
    for symbol in machine.alphabet:
        keys = [(symbol, q, b) for q in range(machine.num_states) for b in masks]
        encoded = {key: encode(table[key]) for key in keys}
        default = None
        if compact:
            counts = Counter(json.dumps(v) for v in encoded.values())
            default_json, hits = counts.most_common(1)[0]
            if hits > 1:
                default = json.loads(default_json)
                records.append({"symbol": symbol, value_field: default})
        for key in keys:
            if default is not None and encoded[key] == default:
                continue
            records.append({"symbol": symbol, "state": key[1], "mask": format_mask(key[2]),
                            value_field: encoded[key]})
    return records


def dumps(machine: CounterMachine, compact: bool = True) -> str:
    return json.dumps(machine_to_dict(machine, compact), indent=1, ensure_ascii=False) + "\n"


def save(machine: CounterMachine, path, compact: bool = True) -> None:
    Path(path).write_text(dumps(machine, compact), encoding="utf-8")


def loads(text: str) -> CounterMachine:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MachineFormatError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return machine_from_dict(data)


def load(path) -> CounterMachine:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MachineFormatError(f"cannot read machine file: {exc.strerror}", str(path)) from None
    return loads(text)


def machine_from_dict(data) -> CounterMachine:
    if not isinstance(data, dict):
        raise MachineFormatError("top level must be an object")
    for name in ("alphabet", "num_states", "num_counters", "updates", "transitions", "accept"):
        if name not in data:
            raise MachineFormatError(f"missing field {name!r}")
    alphabet = data["alphabet"]
    if not isinstance(alphabet, list) or not all(isinstance(s, str) and s for s in alphabet):
        raise MachineFormatError("must be a list of non-empty strings", "alphabet")
    num_states, k = data["num_states"], data["num_counters"]
    if not isinstance(num_states, int) or isinstance(num_states, bool) or num_states < 1:
        raise MachineFormatError("must be a positive integer", "num_states")
    if not isinstance(k, int) or isinstance(k, bool) or k < 0:
        raise MachineFormatError("must be a non-negative integer", "num_counters")

    def decode_actions(value, where):
        if not isinstance(value, list) or len(value) != k:
            raise MachineFormatError(f"must be a list of {k} actions", where)
        try:
            return tuple(parse_action(v) for v in value)
        except ValueError as exc:
            raise MachineFormatError(str(exc), where) from None

    def decode_state(value, where):
        if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < num_states:
            raise MachineFormatError(f"must be a state index in [0, {num_states})", where)
        return value

    updates = _expand(data["updates"], "updates", "actions", decode_actions, alphabet, num_states, k)
    transitions = _expand(data["transitions"], "transitions", "next", decode_state, alphabet, num_states, k)

    accept = []
    if not isinstance(data["accept"], list):
        raise MachineFormatError("must be a list", "accept")
    for i, rec in enumerate(data["accept"]):
        where = f"accept[{i}]"
        if not isinstance(rec, dict) or "state" not in rec or "mask" not in rec:
            raise MachineFormatError("must be an object with 'state' and 'mask'", where)
        q = decode_state(rec["state"], where + ".state")
        try:
            accept.append((q, parse_mask(rec["mask"], k)))
        except ValueError as exc:
            raise MachineFormatError(str(exc), where + ".mask") from None

    thresholds = data.get("thresholds")
    if thresholds is not None:
        if (not isinstance(thresholds, list) or len(thresholds) != k
                or not all(isinstance(m, int) and not isinstance(m, bool) for m in thresholds)):
            raise MachineFormatError(f"must be a list of {k} integers", "thresholds")
    try:
        return CounterMachine(tuple(alphabet), num_states, k, updates, transitions, accept,
                              None if thresholds is None else tuple(thresholds))
    except ContractError as exc:
        raise MachineFormatError(str(exc)) from None


def _expand(records, name, value_field, decode, alphabet, num_states, k):
    if not isinstance(records, list):
        raise MachineFormatError("must be a list", name)
    known = set(alphabet)
    # specificity -> {key: (value, where)}; more specified fields win.
    by_key = {}
    for i, rec in enumerate(records):
        where = f"{name}[{i}]"
        if not isinstance(rec, dict):
            raise MachineFormatError("must be an object", where)
        if value_field not in rec:
            raise MachineFormatError(f"missing field {value_field!r}", where)
        unknown = set(rec) - set(_KEY_FIELDS) - {value_field}
        if unknown:
            raise MachineFormatError(f"unknown field(s) {sorted(unknown)}", where)
        value = decode(rec[value_field], f"{where}.{value_field}")
        if "symbol" in rec and rec["symbol"] not in known:
            raise MachineFormatError(f"unknown symbol {rec['symbol']!r}", f"{where}.symbol")
        symbols = [rec["symbol"]] if "symbol" in rec else list(alphabet)
        if "state" in rec:
            if not isinstance(rec["state"], int) or isinstance(rec["state"], bool) or not 0 <= rec["state"] < num_states:
                raise MachineFormatError(f"must be a state index in [0, {num_states})", f"{where}.state")
            states = [rec["state"]]
        else:
            states = range(num_states)
        if "mask" in rec:
            try:
                masks = [parse_mask(rec["mask"], k)]
            except ValueError as exc:
                raise MachineFormatError(str(exc), f"{where}.mask") from None
        else:
            masks = all_masks(k)
        rank = sum(f in rec for f in _KEY_FIELDS)
        for s in symbols:
            for q in states:
                for b in masks:
                    key = (s, q, b)
                    prev = by_key.get(key)
                    if prev is None or prev[0] < rank:
                        by_key[key] = (rank, value, where)
                    elif prev[0] == rank and prev[1] != value:
                        raise MachineFormatError(
                            f"conflicts with {prev[2]} at symbol={s!r} state={q} mask={format_mask(b)}", where)
    table = {key: value for key, (_, value, _) in by_key.items()}
    for s in alphabet:
        for q in range(num_states):
            for b in all_masks(k):
                if (s, q, b) not in table:
                    raise MachineFormatError(
                        f"table is not total: no entry for symbol={s!r} state={q} mask={format_mask(b)}", name)
    return table
