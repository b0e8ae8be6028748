"""Classification and inheritance of attributes from scored alignments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .align import SearchParams, build_multiple_alignment
from .alignment import Alignment, ensure_legal
from .model import KnowledgeStore, NewInput
from .score import AlignmentProbability


@dataclass(frozen=True)
class Inference:
    symbol: str
    source_pattern: str
    source_row: int
    probability: Optional[float] = None

    @property
    def key(self) -> tuple[str, str]:
        return (self.symbol, self.source_pattern)


def extract_inferences(a: Alignment) -> list[Inference]:
    """Contents symbols of Old rows that are not tied, via a column, to New."""
    ensure_legal(a)
    observed = a.matched_to_new()
    out, seen = [], set()
    for r in range(1, a.n_rows):
        pid = a.rows[r - 1].id
        for p, s in enumerate(a.row_symbols(r)):
            if s.is_id or (r, p) in observed:
                continue
            k = (s.name, pid, r)
            if k not in seen:
                seen.add(k)
                out.append(Inference(s.name, pid, r))
    return out


def inference_probabilities(
    candidates: Sequence[tuple[Alignment, AlignmentProbability]],
) -> dict[tuple[str, str], float]:
    """Sum of p_rel over the candidates that yield each (symbol, pattern) inference."""
    if not candidates:
        raise ValueError("no candidates")
    parts: dict[tuple[str, str], list[float]] = {}
    for a, prob in candidates:
        for key in {inf.key for inf in extract_inferences(a)}:
            parts.setdefault(key, []).append(prob.p_rel)
    # clamp: summing normalised shares can overshoot 1 by an ulp
    return {k: min(1.0, math.fsum(v)) for k, v in sorted(parts.items())}


@dataclass(frozen=True)
class Level:
    pattern_id: str
    row: int
    matched_id_symbols: tuple[str, ...]
    id_symbols: tuple[str, ...]


@dataclass(frozen=True)
class ClassificationReport:
    levels: tuple[Level, ...]
    alignment: Optional[Alignment] = None

    def pattern_ids(self) -> list[str]:
        return [lv.pattern_id for lv in self.levels]


def _levels(a: Alignment) -> tuple[Level, ...]:
    n = a.n_rows
    shared_new = [0] * n
    neighbours: dict[int, set[int]] = {r: set() for r in range(n)}
    for col in a.columns:
        rows = col.rows()
        for r in rows:
            neighbours[r].update(x for x in rows if x != r)
            if col.has_new() and r:
                shared_new[r] += 1
    where = a.column_of()

    def contains(outer: int, inner: int) -> bool:
        # ``outer`` refers to ``inner``: inner's first and last symbols sit in
        # columns that also hold a symbol of ``outer``
        last = len(a.row_symbols(inner)) - 1
        for p in (0, last):
            ci = where.get((inner, p))
            if ci is None or a.columns[ci].entry_for(outer) is None:
                return False
        return True

    start = min(range(1, n), key=lambda r: (-shared_new[r], r))
    order, seen = [start], {start}
    while len(order) < n - 1:
        nxt = None
        # walk the containment links from the newest level back: rows that
        # contain it first, then rows it contains, then any linked row
        for test in (lambda r, x: contains(x, r), lambda r, x: contains(r, x), None):
            for r in reversed(order):
                cands = [
                    x for x in sorted(neighbours[r])
                    if x and x not in seen and (test is None or test(r, x))
                ]
                if cands:
                    nxt = cands[0]
                    break
            if nxt is not None:
                break
        if nxt is None:  # not linked at all (never the case for legal alignments)
            nxt = min(x for x in range(1, n) if x not in seen)
        order.append(nxt)
        seen.add(nxt)
    levels = []
    for r in order:
        syms = a.row_symbols(r)
        levels.append(
            Level(
                a.rows[r - 1].id,
                r,
                tuple(s.name for p, s in enumerate(syms) if s.is_id and (r, p) in where),
                tuple(s.name for s in syms if s.is_id),
            )
        )
    return tuple(levels)


def classify(
    new_input: NewInput, store: KnowledgeStore, params: SearchParams | None = None
) -> ClassificationReport:
    """Levels of the best alignment, most specific first."""
    results = build_multiple_alignment(new_input, store, params)
    if not results:
        return ClassificationReport(())
    a = results[0]
    return ClassificationReport(_levels(a), a)


__all__ = [
    "ClassificationReport",
    "Inference",
    "Level",
    "classify",
    "extract_inferences",
    "inference_probabilities",
]
