"""The SP-multiple-alignment data structure, its legality rules and flattening.

Row 0 holds the New patterns (concatenated in ``new_patterns`` order); every
row from 1 up holds one instance of one Old pattern.  A column is a set of
symbol instances, at most one per row, that all carry the same name.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .model import SPPattern, SPSymbol


class SymbolInstance(NamedTuple):
    row: int
    position: int


@dataclass(frozen=True)
class MatchColumn:
    entries: tuple[SymbolInstance, ...]
    symbol_name: str

    def rows(self) -> list[int]:
        return [e.row for e in self.entries]

    def has_new(self) -> bool:
        return any(e.row == 0 for e in self.entries)

    def entry_for(self, row: int) -> Optional[SymbolInstance]:
        for e in self.entries:
            if e.row == row:
                return e
        return None


class IllegalAlignment(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class Alignment:
    new_patterns: tuple[SPPattern, ...]
    rows: tuple[SPPattern, ...]
    instances: tuple[int, ...]
    columns: tuple[MatchColumn, ...]
    score: object = field(default=None, compare=False, repr=False)

    @property
    def n_rows(self) -> int:
        """Number of rows including row 0."""
        return len(self.rows) + 1

    def row_symbols(self, row: int) -> tuple[SPSymbol, ...]:
        if row == 0:
            return tuple(s for p in self.new_patterns for s in p.symbols)
        return self.rows[row - 1].symbols

    def row_label(self, row: int) -> str:
        if row == 0:
            return "New"
        return f"{self.rows[row - 1].id}#{self.instances[row - 1]}"

    def new_offsets(self) -> list[int]:
        offsets, acc = [], 0
        for p in self.new_patterns:
            offsets.append(acc)
            acc += len(p.symbols)
        return offsets

    def column_of(self) -> dict[tuple[int, int], int]:
        where = {}
        for ci, col in enumerate(self.columns):
            for e in col.entries:
                where[(e.row, e.position)] = ci
        return where

    def matched_to_new(self) -> set[tuple[int, int]]:
        """Symbol instances sharing a column with a row-0 symbol (row 0 included)."""
        out = set()
        for col in self.columns:
            if col.has_new():
                out.update((e.row, e.position) for e in col.entries)
        return out

    def pattern_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for p in self.rows:
            counts[p.id] = counts.get(p.id, 0) + 1
        return counts

    def old_multiset(self) -> tuple[str, ...]:
        return tuple(sorted(p.id for p in self.rows))


def check_alignment_legal(a: Alignment) -> list[str]:
    """Return every violated alignment invariant; an empty list means legal."""
    v: list[str] = []
    if not a.new_patterns:
        v.append("row 0: no New material")
    if len(a.instances) != len(a.rows):
        v.append("rows: instance counters do not match rows")
        return v
    seen_inst = set()
    for r, (p, k) in enumerate(zip(a.rows, a.instances), start=1):
        if (p.id, k) in seen_inst:
            v.append(f"self-match: row {r} repeats instance {p.id}#{k}")
        seen_inst.add((p.id, k))
    lengths = [len(a.row_symbols(r)) for r in range(a.n_rows)]

    used: dict[tuple[int, int], int] = {}
    for ci, col in enumerate(a.columns):
        if len(col.entries) < 2:
            v.append(f"column {ci}: fewer than 2 entries")
        if len(set(col.entries)) != len(col.entries):
            v.append(f"self-match: column {ci} repeats a symbol instance")
        rows = col.rows()
        if len(set(rows)) != len(rows):
            v.append(f"column {ci}: more than one entry for a row")
        for e in col.entries:
            if not (0 <= e.row < a.n_rows) or not (0 <= e.position < lengths[e.row]):
                v.append(f"column {ci}: entry {tuple(e)} out of range")
                continue
            name = a.row_symbols(e.row)[e.position].name
            if name != col.symbol_name:
                v.append(f"column {ci}: {name!r} does not match {col.symbol_name!r}")
            if (e.row, e.position) in used and used[(e.row, e.position)] != ci:
                v.append(f"column {ci}: instance {tuple(e)} already in column {used[(e.row, e.position)]}")
            used[(e.row, e.position)] = ci
        n_ids = sum(
            1
            for e in col.entries
            if 0 < e.row < a.n_rows
            and e.position < lengths[e.row]
            and a.row_symbols(e.row)[e.position].is_id
        )
        if n_ids > 1:
            v.append(f"id-clash: column {ci} holds {n_ids} identification symbols")
        # A symbol may meet a copy of itself only at a different position.
        keys = [
            (a.rows[e.row - 1].id, e.position)
            for e in col.entries
            if 0 < e.row < a.n_rows
        ]
        if len(set(keys)) != len(keys):
            v.append(f"self-match: column {ci} aligns a pattern symbol with its own copy")

    last: dict[int, int] = {}
    for ci, col in enumerate(a.columns):
        for e in col.entries:
            if e.row in last and last[e.row] >= e.position:
                v.append(f"no-crossing: column {ci} row {e.row}")
            last[e.row] = e.position

    if not any(col.has_new() for col in a.columns):
        v.append("no column touches row 0")

    # every Old row must take part and be linked (via columns) to row 0
    adj: dict[int, set[int]] = {r: set() for r in range(a.n_rows)}
    for col in a.columns:
        rows = [r for r in col.rows() if 0 <= r < a.n_rows]
        for r in rows:
            adj[r].update(rows)
    reached, todo = {0}, [0]
    while todo:
        r = todo.pop()
        for s in adj[r]:
            if s not in reached:
                reached.add(s)
                todo.append(s)
    for r in range(1, a.n_rows):
        if not adj[r] - {r}:
            v.append(f"row {r}: takes part in no column")
        elif r not in reached:
            v.append(f"row {r}: not connected to row 0")
    return v


def ensure_legal(a: Alignment) -> None:
    problems = check_alignment_legal(a)
    if problems:
        raise IllegalAlignment(problems)


class Slot(NamedTuple):
    """One position of a flattened alignment: a column or a lone symbol."""

    column: int  # -1 for an unmatched symbol
    row: int
    position: int
    name: str


def linearize(a: Alignment) -> list[Slot]:
    """Merge all rows into one sequence consistent with every row and the column order.

    Unmatched symbols are emitted as early as the constraints allow, lowest
    row first, which keeps the result deterministic.
    """
    where = a.column_of()
    succ: dict[tuple, list[tuple]] = {}
    indeg: dict[tuple, int] = {}

    def node(r, p):
        ci = where.get((r, p))
        return ("c", ci) if ci is not None else ("s", r, p)

    def add_edge(x, y):
        succ.setdefault(x, []).append(y)
        indeg[y] = indeg.get(y, 0) + 1

    nodes = set()
    for r in range(a.n_rows):
        prev = None
        for p in range(len(a.row_symbols(r))):
            n = node(r, p)
            nodes.add(n)
            if prev is not None:
                add_edge(prev, n)
            prev = n
    for ci in range(1, len(a.columns)):
        add_edge(("c", ci - 1), ("c", ci))
    for ci in range(len(a.columns)):
        nodes.add(("c", ci))

    def prio(n):
        return (0, n[1], n[2]) if n[0] == "s" else (1, n[1], 0)

    heap = [prio(n) + (n,) for n in nodes if indeg.get(n, 0) == 0]
    heapq.heapify(heap)
    out: list[Slot] = []
    while heap:
        *_, n = heapq.heappop(heap)
        if n[0] == "s":
            _, r, p = n
            out.append(Slot(-1, r, p, a.row_symbols(r)[p].name))
        else:
            col = a.columns[n[1]]
            e = col.entries[0]
            out.append(Slot(n[1], e.row, e.position, col.symbol_name))
        for m in succ.get(n, ()):
            indeg[m] -= 1
            if indeg[m] == 0:
                heapq.heappush(heap, prio(m) + (m,))
    if len(out) != len(nodes):
        raise IllegalAlignment(["no-crossing: rows and columns admit no common order"])
    return out


def sort_columns(a: Alignment) -> Alignment:
    """Reorder the columns of ``a`` into a sequence every row agrees with.

    Raises IllegalAlignment when the rows admit no such order.
    """
    where = a.column_of()
    succ: dict[int, set[int]] = {ci: set() for ci in range(len(a.columns))}
    indeg = [0] * len(a.columns)
    for r in range(a.n_rows):
        prev = None
        for p in range(len(a.row_symbols(r))):
            ci = where.get((r, p))
            if ci is None:
                continue
            if prev is not None and ci not in succ[prev]:
                succ[prev].add(ci)
                indeg[ci] += 1
            prev = ci
    keys = [tuple(sorted(col.entries)) for col in a.columns]
    heap = [(keys[ci], ci) for ci in range(len(a.columns)) if indeg[ci] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, ci = heapq.heappop(heap)
        order.append(ci)
        for nx in succ[ci]:
            indeg[nx] -= 1
            if indeg[nx] == 0:
                heapq.heappush(heap, (keys[nx], nx))
    if len(order) != len(a.columns):
        raise IllegalAlignment(["no-crossing: rows and columns admit no common order"])
    return Alignment(
        a.new_patterns, a.rows, a.instances, tuple(a.columns[ci] for ci in order), a.score
    )


def flatten_alignment(a: Alignment) -> list[str]:
    ensure_legal(a)
    return [s.name for s in linearize(a)]
