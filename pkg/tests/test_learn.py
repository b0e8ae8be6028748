import pytest

from spalign.align import SearchParams, build_multiple_alignment
from spalign.kbio import parse_kb, serialize_kb
from spalign.learn import LearnParams, assimilate, induce_grammar
from spalign.model import KnowledgeStore, NewInput, Origin, SPPattern, SPSymbol, add_old_pattern
from spalign.score import grammar_score

FAST = SearchParams(beam_width=10)


def new(text):
    return NewInput.from_strings(text).patterns[0]


def contents(p):
    return tuple(s.name for s in p.symbols if not s.is_id)


def test_params_validated():
    with pytest.raises(ValueError):
        LearnParams(grammar_beam=0)
    with pytest.raises(ValueError):
        LearnParams(max_rounds=0)


def test_assimilate_into_empty_store_wraps():
    (p,) = assimilate(new("j o h n r u n s"), KnowledgeStore(()))
    assert contents(p) == tuple("johnruns")
    ids = [s.name for s in p.symbols if s.is_id]
    assert len(ids) == 3 and all(n.startswith("%") for n in ids)
    assert p.origin is Origin.LEARNED and p.frequency == 1


def test_assimilate_splits_shared_suffix():
    (first,) = assimilate(new("j o h n r u n s"), KnowledgeStore(()))
    store = KnowledgeStore((first,))
    cands = assimilate(new("m a r y r u n s"), store, sparams=FAST)
    chunks = {contents(p): p for p in cands}
    assert {tuple("runs"), tuple("john"), tuple("mary")} <= set(chunks)
    # john and mary are alternatives of one class
    assert chunks[tuple("john")].symbols[0].name == chunks[tuple("mary")].symbols[0].name
    name_cls = chunks[tuple("mary")].symbols[0].name
    runs_cls = chunks[tuple("runs")].symbols[0].name
    (abstract,) = [p for p in cands if contents(p) and contents(p)[0].startswith("%")]
    assert contents(abstract) == (name_cls, name_cls + "'", runs_cls, runs_cls + "'")
    assert len({p.id for p in cands}) == len(cands)
    assert all(p.frequency == 1 for p in cands)


def test_assimilate_known_pattern_adds_nothing():
    (first,) = assimilate(new("a b c"), KnowledgeStore(()))
    assert assimilate(new("a b c"), KnowledgeStore((first,))) == []


def test_assimilate_rejects_invalid():
    with pytest.raises(ValueError):
        assimilate(SPPattern("p", ()), KnowledgeStore(()))


def test_fresh_symbols_avoid_existing_names():
    taken = SPPattern("old", (SPSymbol("%1"), SPSymbol("%2"), SPSymbol("q")), 1, Origin.LEARNED)
    store = KnowledgeStore((taken,))
    (p,) = assimilate(new("x y"), store)
    used = {s.name for s in taken.symbols}
    assert not {s.name for s in p.symbols if s.is_id} & used
    assert p.id != "old"


def test_induce_rejects_empty_corpus():
    with pytest.raises(ValueError):
        induce_grammar([])


def _wrapped_copies(text, n):
    """n separate copies of ``text``, each with its own identification symbols."""
    store = KnowledgeStore(())
    for i in range(n):
        store = add_old_pattern(
            store, SPPattern.from_tokens(f"raw{i}", f"!R{i} !r{i} {text} !R{i}'")
        )
    return store


def test_repeated_sequence_learns_one_pattern():
    corpus = [NewInput.from_strings("a b c")] * 10
    g, score = induce_grammar(corpus, sparams=FAST)
    bearing = [p for p in g.patterns if contents(p)]
    assert len(bearing) == 1 and contents(bearing[0]) == ("a", "b", "c")
    raw = grammar_score(_wrapped_copies("a b c", 10), corpus, FAST)
    assert score.total < raw.total


def test_stage_totals_non_increasing():
    corpus = ["j o h n r u n s", "m a r y r u n s", "j o h n w a l k s"]
    g, score = induce_grammar(corpus, sparams=FAST)
    totals = g.stage_totals
    assert all(b <= a for a, b in zip(totals, totals[1:]))
    assert totals[-1] == pytest.approx(score.total)


def test_single_item_corpus():
    g, score = induce_grammar(["j o h n r u n s"], sparams=FAST)
    (p,) = g.patterns
    assert contents(p) == tuple("johnruns")
    assert all(s.is_id for s in (p.symbols[0], p.symbols[1], p.symbols[-1]))
    (a,) = build_multiple_alignment(NewInput.from_strings("j o h n r u n s"), g.store(),
                                    SearchParams(max_alignments=1))
    assert score.E == pytest.approx(a.score.BE)
    assert score.total == pytest.approx(score.G + score.E)


def test_learning_is_deterministic():
    corpus = ["a b c d", "a b x d", "a b c d"]
    g1, s1 = induce_grammar(corpus, sparams=FAST)
    g2, s2 = induce_grammar(corpus, sparams=FAST)
    assert serialize_kb(g1.store()) == serialize_kb(g2.store())
    assert s1 == s2


def test_learned_grammar_round_trips_with_flag():
    g, _ = induce_grammar(["a b c", "a b d"], sparams=FAST)
    text = serialize_kb(g.store())
    store, _ = parse_kb(text, allow_learned=True)
    assert serialize_kb(store) == text


def test_every_item_is_paid_for():
    # E = code of the best alignment + raw cost of unmatched New symbols,
    # so each item can be rebuilt from the grammar, its code and the raw rest
    import math
    from spalign.model import frequency_table
    from spalign.score import raw_cost

    corpus = [NewInput.from_strings(t) for t in ("j o h n r u n s", "m a r y r u n s")]
    g, score = induce_grammar(corpus, sparams=FAST)
    raw_table = frequency_table([p for item in corpus for p in item.patterns])
    parts = []
    for item in corpus:
        res = build_multiple_alignment(item, g.store(), FAST)
        names = item.patterns[0].names
        if not res:
            parts.append(FAST.new_cost_factor * raw_cost(names, raw_table))
            continue
        a = res[0]
        matched = {c.entry_for(0).position for c in a.columns if c.has_new()}
        rest = [n for k, n in enumerate(names) if k not in matched]
        parts.append(a.score.BE + FAST.new_cost_factor * raw_cost(rest, raw_table))
    assert score.E == pytest.approx(math.fsum(parts))
