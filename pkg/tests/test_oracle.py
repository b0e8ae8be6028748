import random

import pytest

from spalign.alignment import check_alignment_legal
from spalign.model import KnowledgeStore, NewInput, SPPattern
from spalign.oracle import OracleLimitError, OracleLimits, enumerate_alignments_bruteforce


def test_single_match():
    store = KnowledgeStore((SPPattern.from_tokens("x", "!X a"),))
    assert len(enumerate_alignments_bruteforce(NewInput.from_strings("a"), store)) == 1


def test_two_patterns_three_alignments():
    store = KnowledgeStore((SPPattern.from_tokens("x", "!X a"), SPPattern.from_tokens("y", "!Y b")))
    found = enumerate_alignments_bruteforce(NewInput.from_strings("a b"), store)
    assert len(found) == 3
    assert found[0][0].old_multiset() == ("x", "y")
    assert found[0][1].CD > max(enc.CD for _, enc in found[1:])


def test_limits_enforced():
    big = KnowledgeStore(tuple(SPPattern.from_tokens(f"p{i}", "a") for i in range(4)))
    with pytest.raises(OracleLimitError, match="too large for oracle"):
        enumerate_alignments_bruteforce(NewInput.from_strings("a"), big)
    long = KnowledgeStore((SPPattern.from_tokens("p", "a b c d e f g"),))
    with pytest.raises(OracleLimitError):
        enumerate_alignments_bruteforce(NewInput.from_strings("a"), long)


def random_instance(seed):
    rng = random.Random(seed)
    pats = []
    for i in range(rng.randint(1, 3)):
        toks = [("!" if rng.random() < 0.35 else "") + rng.choice("abcdXY")
                for _ in range(rng.randint(2, 6))]
        pats.append(SPPattern.from_tokens(f"p{i}", toks))
    new = NewInput.from_strings(" ".join(rng.choice("abcd") for _ in range(rng.randint(2, 5))))
    return new, KnowledgeStore(tuple(pats))


@pytest.mark.parametrize("seed", range(100))
def test_oracle_alignments_are_legal(seed):
    new, store = random_instance(seed)
    for a, enc in enumerate_alignments_bruteforce(
        new, store, OracleLimits(max_instances_per_pattern=1)
    ):
        assert check_alignment_legal(a) == []
        assert enc.CD == pytest.approx(enc.BN - enc.BE, abs=1e-12)
