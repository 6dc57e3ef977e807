import json

import pytest

from countra import MachineFormatError
from countra.enumeration import difftest
from countra.languages import fig1_machine, threshold_machine
from countra.serialize import dumps, load, loads, machine_from_dict, machine_to_dict, save

from helpers import corpus


def minimal():
    return {
        "alphabet": ["a"],
        "num_states": 1,
        "num_counters": 1,
        "updates": [{"actions": ["+1"]}],
        "transitions": [{"next": 0}],
        "accept": [{"state": 0, "mask": "1"}],
    }


@pytest.mark.parametrize("compact", [True, False])
@pytest.mark.parametrize("name", sorted(corpus()))
def test_round_trip(name, compact):
    m = corpus()[name]
    again = loads(dumps(m, compact=compact))
    assert again == m
    assert difftest(m, again, 6).agree


def test_round_trip_threshold():
    m = threshold_machine(-2)
    assert loads(dumps(m)) == m
    assert machine_to_dict(m)["thresholds"] == [-2]


def test_save_and_load(tmp_path):
    path = tmp_path / "fig1.json"
    save(fig1_machine(), path)
    assert load(path) == fig1_machine()


def test_load_missing_file(tmp_path):
    with pytest.raises(MachineFormatError, match="cannot read"):
        load(tmp_path / "missing.json")


def test_wildcard_defaults():
    m = machine_from_dict(minimal())
    assert m.updates["a", 0, (0,)] == m.updates["a", 0, (1,)]
    assert str(m.updates["a", 0, (0,)][0]) == "+1"


def test_specific_record_wins():
    data = minimal()
    data["updates"].append({"symbol": "a", "state": 0, "mask": "0", "actions": ["x0"]})
    m = machine_from_dict(data)
    assert str(m.updates["a", 0, (0,)][0]) == "x0"
    assert str(m.updates["a", 0, (1,)][0]) == "+1"


def test_equal_rank_conflict():
    data = minimal()
    data["updates"].append({"actions": ["-1"]})
    with pytest.raises(MachineFormatError, match=r"updates\[1\].*conflicts with updates\[0\]"):
        machine_from_dict(data)


def test_equal_rank_duplicate_is_fine():
    data = minimal()
    data["updates"].append({"actions": ["+1"]})
    machine_from_dict(data)


def test_json_syntax_error_has_position():
    with pytest.raises(MachineFormatError, match=r"line 2, column \d+"):
        loads('{\n "alphabet": [,]\n}')


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d["updates"].append({"mask": "2", "actions": ["+1"]}), r"updates\[1\]\.mask"),
    (lambda d: d["updates"].__setitem__(0, {"actions": ["+q"]}), r"updates\[0\]\.actions"),
    (lambda d: d["transitions"].__setitem__(0, {"next": 3}), r"transitions\[0\]\.next"),
    (lambda d: d["accept"].__setitem__(0, {"state": 0, "mask": "11"}), r"accept\[0\]\.mask"),
    (lambda d: d["updates"].append({"symbol": "z", "actions": ["+1"]}), r"updates\[1\]\.symbol"),
    (lambda d: d["updates"][0].__setitem__("extra", 1), r"updates\[0\]"),
    (lambda d: d.__setitem__("num_states", 0), "num_states"),
    (lambda d: d.__setitem__("thresholds", ["x"]), "thresholds"),
    (lambda d: d.pop("accept"), "accept"),
])
def test_schema_errors_are_located(mutate, where):
    data = minimal()
    mutate(data)
    with pytest.raises(MachineFormatError, match=where):
        machine_from_dict(data)


def test_partial_table_is_rejected():
    data = minimal()
    data["alphabet"] = ["a", "b"]
    data["updates"] = [{"symbol": "a", "actions": ["+1"]}]
    with pytest.raises(MachineFormatError, match="not total"):
        machine_from_dict(data)


def test_compact_is_smaller():
    m = corpus()["lm2"]
    assert len(dumps(m, compact=True)) < len(dumps(m, compact=False))
    assert len(json.loads(dumps(m, compact=False))["updates"]) == len(m.updates)
