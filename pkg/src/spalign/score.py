"""Bit costs, alignment encoding and probabilities, grammar scoring."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .alignment import Alignment, ensure_legal
from .model import FrequencyTable, frequency_table

# Weight applied to the bit cost of matched New symbols.  With weight 1 every
# full sentence parse has negative CD (a word pattern carries three ID symbols for
# one contents symbol), so small fragments would outrank full parses.
DEFAULT_NEW_COST_FACTOR = 3.0


def symbol_cost(table: FrequencyTable, name: str) -> float:
    f = table.frequency(name)
    if f >= table.total:
        return 0.0
    return math.log2(table.total) - math.log2(f)


@dataclass(frozen=True)
class EncodingResult:
    BN: float
    BE: float
    CD: float
    code: tuple[str, ...]

    @property
    def bn(self) -> float:
        return self.BN

    @property
    def be(self) -> float:
        return self.BE

    @property
    def cd(self) -> float:
        return self.CD


def encode_alignment(
    a: Alignment,
    table: FrequencyTable,
    new_cost_factor: float = DEFAULT_NEW_COST_FACTOR,
) -> EncodingResult:
    ensure_legal(a)
    new_syms = a.row_symbols(0)
    matched_new = sorted({e.position for col in a.columns for e in col.entries if e.row == 0})
    bn = new_cost_factor * math.fsum(symbol_cost(table, new_syms[p].name) for p in matched_new)
    where = a.column_of()
    code = []
    for r in range(1, a.n_rows):
        for p, s in enumerate(a.row_symbols(r)):
            if s.is_id and (r, p) not in where:
                code.append(s.name)
    be = math.fsum(symbol_cost(table, n) for n in code)
    return EncodingResult(bn, be, bn - be, tuple(code))


@dataclass(frozen=True)
class AlignmentProbability:
    p_abs: float
    p_rel: float


def alignment_probabilities(
    candidates: Sequence[tuple[Alignment, EncodingResult]],
) -> list[AlignmentProbability]:
    if not candidates:
        raise ValueError("no candidates")
    bes = [enc.BE for _, enc in candidates]
    p_abs = [2.0 ** -be for be in bes]
    # normalise in the log domain so large BE values do not underflow
    lo = min(bes)
    rel = [2.0 ** -(be - lo) for be in bes]
    total = math.fsum(rel)
    return [AlignmentProbability(pa, r / total) for pa, r in zip(p_abs, rel)]


@dataclass(frozen=True)
class GrammarScore:
    G: float
    E: float
    total: float


def raw_cost(names: Sequence[str], table: FrequencyTable) -> float:
    return math.fsum(symbol_cost(table, n) for n in names)


def grammar_score(g, corpus, params=None, *, raw_table=None) -> GrammarScore:
    """Two-part code length of ``corpus`` under grammar ``g``.

    ``g`` is a Grammar or any iterable of patterns; ``corpus`` a list of
    NewInput.  G is the bit cost of every grammar symbol.  An item costs the
    code of its best alignment plus its unmatched New symbols sent raw; an
    item that no alignment encodes is sent raw entirely.  Raw symbols are
    priced with ``raw_table`` (by default the corpus' own symbol counts),
    weighted like matched New symbols in BN so that raw and encoded items are
    measured on one scale.
    """
    from .align import SearchParams, build_multiple_alignment
    from .model import KnowledgeStore

    params = params or SearchParams()
    factor = params.new_cost_factor
    patterns = tuple(getattr(g, "patterns", g))
    if raw_table is None and corpus:
        raw_table = frequency_table([p for item in corpus for p in item.patterns])

    def raw(names):
        return factor * raw_cost(names, raw_table)

    if not patterns:
        e = math.fsum(raw(_names(item)) for item in corpus)
        return GrammarScore(0.0, e, e)
    store = KnowledgeStore(patterns)
    table = frequency_table(store)
    G = math.fsum(symbol_cost(table, s.name) for p in patterns for s in p.symbols)
    costs = []
    memo: dict[tuple, float] = {}
    for item in corpus:
        key = tuple(_names_per_pattern(item))
        if key not in memo:
            best = build_multiple_alignment(item, store, params, table=table)
            if best:
                a = best[0]
                matched = {e.position for col in a.columns for e in col.entries if e.row == 0}
                rest = [s.name for k, s in enumerate(a.row_symbols(0)) if k not in matched]
                memo[key] = a.score.BE + raw(rest)
            else:
                memo[key] = raw(_names(item))
        costs.append(memo[key])
    E = math.fsum(costs)
    return GrammarScore(G, E, G + E)


def _names(item) -> list[str]:
    return [s.name for p in item.patterns for s in p.symbols]


def _names_per_pattern(item):
    return [p.names for p in item.patterns]


__all__ = [
    "AlignmentProbability",
    "EncodingResult",
    "FrequencyTable",
    "GrammarScore",
    "alignment_probabilities",
    "encode_alignment",
    "frequency_table",
    "grammar_score",
    "raw_cost",
    "symbol_cost",
]
