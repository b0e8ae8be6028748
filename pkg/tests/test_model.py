import pytest
from hypothesis import given, strategies as st

from spalign.model import (
    KnowledgeStore,
    NewInput,
    Role,
    SPPattern,
    SPSymbol,
    StoreError,
    add_old_pattern,
    frequency_table,
    validate_pattern,
)
from spalign.kbio import serialize_kb


def test_minimal_pattern_is_valid():
    assert validate_pattern(SPPattern.from_tokens("p", "fruit")) == []


def test_empty_pattern_rejected():
    assert "empty pattern" in validate_pattern(SPPattern("p", ()))


def test_zero_frequency_rejected():
    assert "frequency < 1" in validate_pattern(SPPattern.from_tokens("p", "a", frequency=0))


def test_from_tokens_roles():
    p = SPPattern.from_tokens("fr1", "!A !12 fruit !/A", 12)
    assert [s.role for s in p.symbols] == [
        Role.IDENTIFICATION, Role.IDENTIFICATION, Role.CONTENTS, Role.IDENTIFICATION
    ]
    assert p.names == ("A", "12", "fruit", "/A")


def test_add_to_empty_store():
    store = add_old_pattern(KnowledgeStore(()), SPPattern.from_tokens("fr1", "!A !12 fruit !/A"))
    assert len(store) == 1


def test_duplicate_id_rejected():
    store = KnowledgeStore((SPPattern.from_tokens("p1", "a"),))
    with pytest.raises(StoreError):
        add_old_pattern(store, SPPattern.from_tokens("p1", "b"))
    with pytest.raises(StoreError):
        KnowledgeStore((SPPattern.from_tokens("p1", "a"), SPPattern.from_tokens("p1", "b")))


def test_add_is_persistent():
    store = KnowledgeStore((SPPattern.from_tokens("a1", "!X a"), SPPattern.from_tokens("b1", "b")))
    before = serialize_kb(store)
    grown = add_old_pattern(store, SPPattern.from_tokens("c1", "c"))
    assert len(grown) == 3 and len(store) == 2
    assert grown.patterns[:2] == store.patterns
    assert serialize_kb(grown).startswith(before)


def test_frequency_table_counts():
    t = frequency_table([SPPattern.from_tokens("p", "!X a b")])
    assert (t.frequency("X"), t.frequency("a"), t.frequency("b"), t.total) == (1, 1, 1, 3)
    t = frequency_table([SPPattern.from_tokens("p", "!X a a", 2)])
    assert (t.frequency("X"), t.frequency("a"), t.total) == (2, 4, 6)


def test_frequency_table_floor_for_unseen():
    t = frequency_table([SPPattern.from_tokens("p", "a")])
    assert t.frequency("zzz") == 1


def test_frequency_table_empty_store():
    with pytest.raises(ValueError):
        frequency_table(KnowledgeStore(()))


def test_new_input_forces_contents_and_unit_frequency():
    n = NewInput((SPPattern.from_tokens("n", "!a b", 5),))
    p = n.patterns[0]
    assert p.frequency == 1 and all(s.role is Role.CONTENTS for s in p.symbols)


def test_new_input_needs_material():
    with pytest.raises(ValueError):
        NewInput(())
    with pytest.raises(ValueError):
        NewInput((SPPattern("n", ()),))


names = st.text(alphabet="abcXY|%! ", min_size=0, max_size=4)


@given(st.lists(names, max_size=5), st.integers(min_value=-2, max_value=3))
def test_validate_pattern_matches_invariants(syms, freq):
    p = SPPattern("p", tuple(SPSymbol(n) for n in syms), freq)
    ok = (
        len(syms) > 0
        and freq >= 1
        and all(n and "|" not in n and not any(c.isspace() for c in n) for n in syms)
    )
    assert (validate_pattern(p) == []) == ok


@given(st.lists(st.lists(st.sampled_from("abcXY"), min_size=1, max_size=5), min_size=1, max_size=4),
       st.lists(st.integers(min_value=1, max_value=4), min_size=4, max_size=4))
def test_frequency_total_is_weighted_symbol_count(bodies, freqs):
    pats = [SPPattern.from_tokens(f"p{i}", b, freqs[i]) for i, b in enumerate(bodies)]
    t = frequency_table(pats)
    assert t.total == sum(len(p.symbols) * p.frequency for p in pats)
    assert sum(t.counts.values()) == t.total
