import pytest

from spalign.kbio import KBParseError, fixture_names, fixture_text, parse_kb, serialize_kb
from spalign.model import KnowledgeStore, Role


def test_old_record():
    store, new = parse_kb("O fr1 12 | !A !12 fruit !/A\n")
    p = store["fr1"]
    assert p.frequency == 12 and new is None
    assert [(s.name, s.role) for s in p.symbols] == [
        ("A", Role.IDENTIFICATION), ("12", Role.IDENTIFICATION),
        ("fruit", Role.CONTENTS), ("/A", Role.IDENTIFICATION),
    ]


def test_new_record():
    _, new = parse_kb("N | fruit flies like a banana\n")
    assert len(new) == 1 and new.patterns[0].names == tuple("fruit flies like a banana".split())


def test_zero_frequency_error_has_line():
    with pytest.raises(KBParseError) as e:
        parse_kb("# header\nO p1 0 | a\n")
    assert e.value.line == 2 and "frequency < 1" in e.value.reason


def test_duplicate_id_error():
    with pytest.raises(KBParseError) as e:
        parse_kb("O p 1 | a\nO p 1 | b\n")
    assert e.value.line == 2


def test_reserved_prefix_error():
    with pytest.raises(KBParseError, match="reserved prefix"):
        parse_kb("O p 1 | %1 a\n")
    with pytest.raises(KBParseError, match="reserved prefix"):
        parse_kb("N | %x\n")


def test_comments_and_spacing():
    text = "# top\nO   p   2 |  !X   a b  # trailing\n\n   \nN |   a   b\n"
    store, new = parse_kb(text)
    assert store["p"].names == ("X", "a", "b")
    assert new.patterns[0].names == ("a", "b")


@pytest.mark.parametrize("line", ["O p | a", "O p x | a", "Q | a", "O p 1 a", "N a"])
def test_malformed_lines(line):
    with pytest.raises(KBParseError):
        parse_kb(line + "\n")


def test_empty_store_serializes():
    assert serialize_kb(KnowledgeStore(())) == ""


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_round_trip(name):
    store, new = parse_kb(fixture_text(name))
    text = serialize_kb(store, new)
    store2, new2 = parse_kb(text)
    assert store2.patterns == tuple(sorted(store.patterns, key=lambda p: p.id))
    assert new2 == new
    assert serialize_kb(store2, new2) == text


def test_learned_symbols_need_flag():
    text = "O g0001 1 | !%1 !%2 a b !%1'\n"
    with pytest.raises(KBParseError):
        parse_kb(text)
    store, _ = parse_kb(text, allow_learned=True)
    assert serialize_kb(store) == text


def test_all_example_kbs_shipped():
    assert set(fixture_names()) >= {
        "fruit_flies", "kittens", "kittens_noisy", "icecream", "icecream_loudly",
        "icecream_cold", "plant", "salad", "horse_phase1", "horse_phase2",
    }
