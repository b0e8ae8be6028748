"""Unsupervised grammar learning: assimilation of New patterns and grammar search.

Learning runs in two phases.  Each corpus item is first assimilated into a
growing pool of candidate patterns: an item that nothing encodes is wrapped
with fresh identification symbols, and an item that is partly encoded is cut
into chunks along its matched and unmatched runs, with an abstract pattern
that references the chunks through their class symbols.  The second phase
searches subsets of the pool for the grammar with the smallest G + E.

Learned symbols start with a reserved prefix (``%`` by default), so they can
never clash with user symbols.  A class ``%k`` is delimited by ``%k`` and
``%k'``; every pattern also carries a fresh discriminator symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .align import SearchParams, build_multiple_alignment
from .alignment import Alignment
from .model import (
    KnowledgeStore,
    NewInput,
    Origin,
    Role,
    SPPattern,
    SPSymbol,
    add_old_pattern,
    frequency_table,
    validate_pattern,
)
from .score import GrammarScore, grammar_score


@dataclass(frozen=True)
class LearnParams:
    assimilation_min_cd: float = 0.5
    grammar_beam: int = 20
    max_rounds: int = 10
    id_prefix: str = "%"

    def __post_init__(self):
        for name in ("grammar_beam", "max_rounds"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {v!r}")
        if not math.isfinite(self.assimilation_min_cd):
            raise ValueError("assimilation_min_cd must be finite")
        if not self.id_prefix or any(ch.isspace() for ch in self.id_prefix):
            raise ValueError("id_prefix must be a non-empty token")


@dataclass(frozen=True)
class Grammar:
    patterns: tuple[SPPattern, ...]
    provenance: dict[str, str] = field(default_factory=dict)
    stage_totals: tuple[float, ...] = ()

    def store(self) -> KnowledgeStore:
        return KnowledgeStore(self.patterns)


class _Fresh:
    """Source of learned symbols and pattern ids unused by ``taken``."""

    def __init__(self, taken_symbols: Iterable[str], taken_ids: Iterable[str], prefix: str):
        self.prefix = prefix
        self.symbols = set(taken_symbols)
        self.ids = set(taken_ids)
        self._n = 0
        self._g = 0

    def symbol(self) -> str:
        while True:
            self._n += 1
            name = f"{self.prefix}{self._n}"
            if name not in self.symbols and name + "'" not in self.symbols:
                self.symbols.update((name, name + "'"))
                return name

    def pattern_id(self) -> str:
        while True:
            self._g += 1
            pid = f"g{self._g:04d}"
            if pid not in self.ids:
                self.ids.add(pid)
                return pid


def _learned(pid: str, ids_and_contents: Sequence[tuple[str, bool]]) -> SPPattern:
    syms = tuple(SPSymbol(n, Role.IDENTIFICATION if is_id else Role.CONTENTS)
                 for n, is_id in ids_and_contents)
    return SPPattern(pid, syms, 1, Origin.LEARNED)


def _chunk(fresh: _Fresh, cls: str, contents: Sequence[str]) -> SPPattern:
    body = [(cls, True), (fresh.symbol(), True)]
    body += [(n, False) for n in contents]
    body.append((cls + "'", True))
    return _learned(fresh.pattern_id(), body)


def _shape(p: SPPattern):
    """(class, contents) when ``p`` has the learned shape ``C d ... C'``."""
    s = p.symbols
    if (
        len(s) >= 3
        and s[0].is_id
        and s[1].is_id
        and s[-1].is_id
        and s[-1].name == s[0].name + "'"
    ):
        return s[0].name, tuple(x.name for x in s[2:-1] if not x.is_id)
    return None


class _Index:
    """Learned classes and their members, kept in step with a working store."""

    def __init__(self, store: KnowledgeStore):
        self.class_of: dict[tuple[str, ...], str] = {}
        for p in store:
            if p.origin is Origin.LEARNED:
                shp = _shape(p)
                if shp:
                    self.class_of.setdefault(shp[1], shp[0])

    def add(self, p: SPPattern) -> None:
        shp = _shape(p)
        if shp:
            self.class_of.setdefault(shp[1], shp[0])


def _wrap(p: SPPattern, fresh: _Fresh) -> SPPattern:
    return _chunk(fresh, fresh.symbol(), p.names)


def _runs(a: Alignment, row: int) -> list[tuple[int, int, int]]:
    """Maximal runs (new_start, old_start, length) of New matched to ``row``."""
    pairs = sorted(
        (col.entry_for(0).position, col.entry_for(row).position)
        for col in a.columns
        if col.entry_for(0) is not None and col.entry_for(row) is not None
    )
    runs: list[list[int]] = []
    for n, o in pairs:
        if runs and runs[-1][0] + runs[-1][2] == n and runs[-1][1] + runs[-1][2] == o:
            runs[-1][2] += 1
        else:
            runs.append([n, o, 1])
    return [tuple(r) for r in runs]


def _target_row(a: Alignment) -> int:
    counts = [0] * a.n_rows
    for col in a.columns:
        if col.has_new():
            for e in col.entries:
                if e.row:
                    counts[e.row] += 1
    return min(range(1, a.n_rows), key=lambda r: (-counts[r], r))


def assimilate(
    p: SPPattern,
    store: KnowledgeStore,
    params: LearnParams | None = None,
    sparams: SearchParams | None = None,
) -> list[SPPattern]:
    """Candidate Old patterns that let ``store`` encode ``p``.

    Returns an empty list when ``p`` is already fully encoded.
    """
    params = params or LearnParams()
    problems = validate_pattern(p)
    if problems:
        raise ValueError("; ".join(problems))
    new = NewInput((p,))
    fresh = _Fresh(
        store.symbol_names() | set(p.names), store.ids(), params.id_prefix
    )
    if not len(store):
        return [_wrap(new.patterns[0], fresh)]
    sp = replace(sparams or SearchParams(), max_alignments=10, min_cd=params.assimilation_min_cd)
    results = build_multiple_alignment(new, store, sp)
    if not results:
        return [_wrap(new.patterns[0], fresh)]

    best = max(results, key=lambda a: (a.score.CD, -len(_runs(a, _target_row(a)))))
    matched = {e.position for col in best.columns for e in col.entries if e.row == 0 and col.has_new()}
    names = p.names
    if len(matched) == len(names):
        return []

    row = _target_row(best)
    old = best.row_symbols(row)
    runs = _runs(best, row)
    index = _Index(store)
    out: list[SPPattern] = []

    def class_for(contents: tuple[str, ...], cls: str | None = None) -> str:
        known = index.class_of.get(contents)
        if known is not None:
            return known
        cls = cls or fresh.symbol()
        pat = _chunk(fresh, cls, contents)
        index.add(pat)
        out.append(pat)
        return cls

    def old_contents(lo: int, hi: int) -> tuple[str, ...]:
        return tuple(s.name for s in old[lo:hi] if not s.is_id)

    refs: list[str] = []
    pn, po = 0, 0
    for n0, o0, ln in runs + [(len(names), len(old), 0)]:
        gap_new = tuple(names[pn:n0])
        gap_old = old_contents(po, o0)
        if gap_new and gap_old:
            # both sides vary here: they become members of one class
            cls = index.class_of.get(gap_new) or index.class_of.get(gap_old)
            cls = class_for(gap_new, cls)
            class_for(gap_old, cls)
            refs.append(cls)
        elif gap_new:
            refs.append(class_for(gap_new))
        elif gap_old:
            class_for(gap_old)
        if ln:
            refs.append(class_for(tuple(names[n0:n0 + ln])))
        pn, po = n0 + ln, o0 + ln

    if len(refs) > 1:
        body = tuple(x for c in refs for x in (c, c + "'"))
        if body not in index.class_of:
            abstract = _chunk(fresh, fresh.symbol(), body)
            index.add(abstract)
            out.append(abstract)
    return out


def _as_new(item) -> NewInput:
    if isinstance(item, NewInput):
        return item
    if isinstance(item, SPPattern):
        return NewInput((item,))
    if isinstance(item, str):
        return NewInput.from_strings(item)
    raise TypeError(f"corpus item of type {type(item).__name__}")


class _Evaluator:
    """G + E of pool subsets, with frequencies fitted to the corpus."""

    def __init__(self, pool, corpus, sparams, raw_table):
        self.pool = pool
        self.corpus = corpus
        self.sparams = sparams
        self.raw_table = raw_table
        self.memo: dict[frozenset, tuple[GrammarScore, tuple[SPPattern, ...]]] = {}

    def __call__(self, chosen: frozenset):
        if chosen in self.memo:
            return self.memo[chosen]
        pats = tuple(self.pool[i] for i in sorted(chosen))
        if pats:
            # frequency = number of items whose best alignment uses the pattern
            store = KnowledgeStore(pats)
            table = frequency_table(store)
            usage: dict[str, int] = {}
            for item in self.corpus:
                res = build_multiple_alignment(item, store, self.sparams, table=table)
                if res:
                    for pid in set(res[0].old_multiset()):
                        usage[pid] = usage.get(pid, 0) + 1
            pats = tuple(replace(p, frequency=max(1, usage.get(p.id, 0))) for p in pats)
        score = grammar_score(pats, self.corpus, self.sparams, raw_table=self.raw_table)
        self.memo[chosen] = (score, pats)
        return score, pats


def induce_grammar(
    corpus: Sequence,
    params: LearnParams | None = None,
    sparams: SearchParams | None = None,
) -> tuple[Grammar, GrammarScore]:
    """Learn a grammar for ``corpus`` (New patterns, NewInputs or strings)."""
    params = params or LearnParams()
    sparams = sparams or SearchParams()
    items = [_as_new(x) for x in corpus]
    if not items:
        raise ValueError("empty corpus")

    # phase 1: assimilate each item into a growing pool
    store = KnowledgeStore(())
    pool: list[SPPattern] = []
    provenance: dict[str, str] = {}
    for k, item in enumerate(items):
        for pat in item.patterns:
            for cand in assimilate(pat, store, params, sparams):
                store = add_old_pattern(store, cand)
                pool.append(cand)
                provenance[cand.id] = f"assimilated from corpus item {k}"

    # phase 2: grow grammars from the empty one while G + E decreases
    raw_table = frequency_table([p for item in items for p in item.patterns])
    evaluate = _Evaluator(pool, items, sparams, raw_table)

    def total(g):
        return evaluate(g)[0].total

    beam = [frozenset()]
    stages = [total(beam[0])]
    for _ in range(params.max_rounds):
        cands = set(beam)
        for g in beam:
            base = total(g)
            for i in range(len(pool)):
                if i not in g:
                    h = g | {i}
                    if total(h) < base:
                        cands.add(h)
        ranked = sorted(cands, key=lambda g: (total(g), len(g), sorted(g)))
        nxt = ranked[: params.grammar_beam]
        if set(nxt) == set(beam):
            break
        beam = nxt
        stages.append(total(beam[0]))
    best = min(beam, key=lambda g: (total(g), len(g), sorted(g)))
    score, pats = evaluate(best)
    grammar = Grammar(pats, {p.id: provenance[p.id] for p in pats}, tuple(stages))
    return grammar, score


__all__ = ["Grammar", "LearnParams", "assimilate", "induce_grammar"]
