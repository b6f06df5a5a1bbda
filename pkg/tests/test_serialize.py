"""Serialization helpers: deterministic tables, atomic files, JSON."""

from __future__ import annotations

import json
import os

import pytest

from mms.serialize import (atomic_write, canonical_json, csv_table, load_json,
                           worker_cap)


def test_csv_floats_round_trip_shortest_form():
    table = csv_table([(0.1, 1.0 / 3.0)], ("a", "b"))
    line = table.splitlines()[1]
    assert line == "0.1,0.3333333333333333"
    a, b = (float(cell) for cell in line.split(","))
    assert a == 0.1 and b == 1.0 / 3.0


def test_csv_bools_and_config_echo():
    table = csv_table([(True, False)], ("x", "y"), {"p": 2.0, "flag": True})
    lines = table.splitlines()
    assert lines[0] == "# flag=true"
    assert lines[1] == "# p=2.0"
    assert lines[-1] == "true,false"


def test_csv_rejects_ragged_rows():
    with pytest.raises(ValueError):
        csv_table([(1, 2, 3)], ("a", "b"))


def test_canonical_json_is_stable_and_sorted():
    doc = {"b": 1, "a": [1.5, True, None]}
    text = canonical_json(doc)
    assert text == canonical_json(json.loads(text))
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")


def test_atomic_write_and_no_temp_residue(tmp_path):
    target = tmp_path / "out.txt"
    atomic_write(str(target), "payload\n")
    assert target.read_text() == "payload\n"
    leftovers = [n for n in os.listdir(tmp_path) if n != "out.txt"]
    assert leftovers == []


def test_load_json_reports_line_and_column(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "a": 1,\n  "b": }\n')
    with pytest.raises(ValueError) as err:
        load_json(str(bad))
    assert "line 3" in str(err.value)
    assert "column" in str(err.value)


def test_worker_cap_env_override(monkeypatch):
    monkeypatch.setenv("MMS_THREADS", "3")
    assert worker_cap() == 3
    monkeypatch.delenv("MMS_THREADS")
    assert worker_cap() >= 1


def test_worker_cap_rejects_bad_values(monkeypatch):
    monkeypatch.setenv("MMS_THREADS", "0")
    with pytest.raises(ValueError):
        worker_cap()
    monkeypatch.setenv("MMS_THREADS", "many")
    with pytest.raises(ValueError):
        worker_cap()
