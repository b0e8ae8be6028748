import json
from decimal import Decimal
from pathlib import Path

import pytest

from spalign.emit import emit_json
from spalign.kbio import fixture_names

from conftest import best

GOLDEN = Path(__file__).parent / "golden"


def test_schema_and_key_order():
    doc = json.loads(emit_json(list(best("fruit_flies"))))
    assert list(doc) == ["alignments"]
    for a in doc["alignments"]:
        assert list(a) == ["rows", "columns", "bn", "be", "cd", "p_abs", "p_rel", "inferences"]
        for c in a["columns"]:
            assert list(c) == ["symbol", "entries"]
            assert all(list(e) == ["row", "pos"] for e in c["entries"])
        for i in a["inferences"]:
            assert list(i) == ["symbol", "source_pattern", "probability"]


def _numbers(text, key):
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith(f'"{key}": '):
            out.append(line.split(": ", 1)[1].rstrip(","))
    return out


@pytest.mark.parametrize("name", ["fruit_flies", "icecream", "horse_phase1"])
def test_six_decimals_and_cd_identity(name):
    text = emit_json(list(best(name)))
    for key in ("bn", "be", "cd", "p_abs", "p_rel", "probability"):
        for num in _numbers(text, key):
            assert len(num.split(".")[1]) == 6
    for bn, be, cd in zip(_numbers(text, "bn"), _numbers(text, "be"), _numbers(text, "cd")):
        assert Decimal(cd) == Decimal(bn) - Decimal(be)


def test_singleton_p_rel():
    text = emit_json(list(best("horse_phase1", 1)))
    assert _numbers(text, "p_rel") == ["1.000000"]


def test_empty_results():
    assert json.loads(emit_json([])) == {"alignments": []}


def test_byte_identical_runs():
    assert emit_json(list(best("kittens"))) == emit_json(list(best("kittens")))


def test_golden_fruit_flies():
    text = emit_json(list(best("fruit_flies")))
    assert text == (GOLDEN / "fruit_flies.json").read_text(encoding="utf-8")
