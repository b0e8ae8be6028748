"""Exhaustive enumeration of legal alignments for tiny instances.

Only meant as a test oracle for the beam search: the number of alignments
grows combinatorially with store size, so a node budget guards every run.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .alignment import (
    Alignment,
    MatchColumn,
    SymbolInstance,
    check_alignment_legal,
    sort_columns,
)
from .model import FrequencyTable, KnowledgeStore, NewInput, frequency_table
from .score import DEFAULT_NEW_COST_FACTOR, EncodingResult, encode_alignment


class OracleLimitError(ValueError):
    def __init__(self, detail: str):
        super().__init__(f"instance too large for oracle: {detail}")


@dataclass(frozen=True)
class OracleLimits:
    max_patterns: int = 3
    max_symbols: int = 6
    max_instances_per_pattern: int = 2
    node_budget: int = 200_000


def exact_key(a: Alignment) -> tuple:
    """Canonical form of ``a``, minimised over all relabellings of instances."""
    by_pid: dict[str, list[int]] = {}
    for r, p in enumerate(a.rows, start=1):
        by_pid.setdefault(p.id, []).append(r)
    pids = sorted(by_pid)
    offsets = a.new_offsets()

    def new_label(pos):
        b = max(i for i, off in enumerate(offsets) if off <= pos)
        return ("", b, pos - offsets[b])

    best = None
    for perms in itertools.product(*(itertools.permutations(by_pid[p]) for p in pids)):
        inst = {}
        for pid, perm in zip(pids, perms):
            for k, r in enumerate(perm):
                inst[r] = (pid, k)
        cols = sorted(
            tuple(
                sorted(new_label(e.position) if e.row == 0 else inst[e.row] + (e.position,)
                       for e in col.entries)
            )
            for col in a.columns
        )
        key = tuple(cols)
        if best is None or key < best:
            best = key
    rows = tuple(sorted(p.id for p in a.rows))
    return (tuple(p.id for p in a.new_patterns), rows, best or ())


def _nodes(a: Alignment):
    """Nodes (columns and lone symbols) with their names and ancestor sets."""
    where = a.column_of()
    node_of: dict[tuple[int, int], int] = {}
    nodes: list[tuple] = []  # ("c", ci) or ("s", row, pos)
    names: list[str] = []
    for ci, col in enumerate(a.columns):
        for e in col.entries:
            node_of[(e.row, e.position)] = len(nodes)
        nodes.append(("c", ci))
        names.append(col.symbol_name)
    for r in range(a.n_rows):
        for p, s in enumerate(a.row_symbols(r)):
            if (r, p) not in where:
                node_of[(r, p)] = len(nodes)
                nodes.append(("s", r, p))
                names.append(s.name)
    succ: list[set[int]] = [set() for _ in nodes]
    for r in range(a.n_rows):
        for p in range(1, len(a.row_symbols(r))):
            succ[node_of[(r, p - 1)]].add(node_of[(r, p)])
    # ancestors by repeated relaxation (graphs here are tiny)
    anc = [set() for _ in nodes]
    changed = True
    while changed:
        changed = False
        for u in range(len(nodes)):
            for v in succ[u]:
                add = (anc[u] | {u}) - anc[v]
                if add:
                    anc[v] |= add
                    changed = True
    return nodes, names, anc


def _matchings(a: Alignment, target, nodes, names, anc):
    """Every admissible way of attaching ``target`` to the nodes of ``a``."""
    m = len(target.symbols)

    def entries(node):
        if node[0] == "c":
            return a.columns[node[1]].entries
        return (SymbolInstance(node[1], node[2]),)

    options: list[list[int]] = []
    for j, ts in enumerate(target.symbols):
        opts = []
        for u, node in enumerate(nodes):
            if names[u] != ts.name:
                continue
            es = entries(node)
            if any(e.row and a.rows[e.row - 1].id == target.id and e.position == j for e in es):
                continue
            if ts.is_id and any(e.row and a.rows[e.row - 1].symbols[e.position].is_id for e in es):
                continue
            opts.append(u)
        options.append(opts)

    chosen: list[tuple[int, int]] = []

    def rec(j):
        if j == m:
            yield tuple(chosen)
            return
        yield from rec(j + 1)
        for u in options[j]:
            ok = True
            for j2, u2 in chosen:
                if u2 == u or u in anc[u2]:
                    ok = False
                    break
            if ok:
                chosen.append((j, u))
                yield from rec(j + 1)
                chosen.pop()

    yield from rec(0)


def _attach(a: Alignment, target, nodes, matching) -> Alignment:
    R = a.n_rows
    cols = list(a.columns)
    for j, u in matching:
        node = nodes[u]
        if node[0] == "c":
            col = cols[node[1]]
            cols[node[1]] = MatchColumn(col.entries + (SymbolInstance(R, j),), col.symbol_name)
        else:
            _, r, p = node
            cols.append(
                MatchColumn((SymbolInstance(r, p), SymbolInstance(R, j)), target.symbols[j].name)
            )
    inst = 1 + sum(1 for p in a.rows if p.id == target.id)
    return sort_columns(
        Alignment(a.new_patterns, a.rows + (target,), a.instances + (inst,), tuple(cols))
    )


def enumerate_alignments_bruteforce(
    new_input: NewInput,
    store: KnowledgeStore,
    limits: OracleLimits | None = None,
    table: FrequencyTable | None = None,
    new_cost_factor: float = DEFAULT_NEW_COST_FACTOR,
) -> list[tuple[Alignment, EncodingResult]]:
    """All legal alignments (up to the reuse cap), best CD first."""
    limits = limits or OracleLimits()
    if len(store) > limits.max_patterns:
        raise OracleLimitError(f"{len(store)} Old patterns > {limits.max_patterns}")
    for p in store:
        if len(p.symbols) > limits.max_symbols:
            raise OracleLimitError(f"pattern {p.id} has {len(p.symbols)} symbols")
    if not len(store):
        raise ValueError("empty store")
    table = table or frequency_table(store)
    patterns = list(store)

    root = Alignment(tuple(new_input.patterns), (), (), ())
    seen = {exact_key(root)}
    frontier = [(root, 0)]
    budget = limits.node_budget
    found: dict[tuple, Alignment] = {}
    while frontier:
        nxt = []
        for a, first in frontier:
            counts = a.pattern_counts()
            nodes, names, anc = _nodes(a)
            # rows are added in store order so each multiset is built once
            for k in range(first, len(patterns)):
                target = patterns[k]
                if counts.get(target.id, 0) >= limits.max_instances_per_pattern:
                    continue
                for matching in _matchings(a, target, nodes, names, anc):
                    b = _attach(a, target, nodes, matching)
                    key = exact_key(b)
                    if key in seen:
                        continue
                    seen.add(key)
                    budget -= 1
                    if budget < 0:
                        raise OracleLimitError(f"node budget {limits.node_budget} exceeded")
                    nxt.append((b, k))
                    if not check_alignment_legal(b):
                        found[key] = b
        frontier = nxt
    out = []
    for key in sorted(found):
        a = found[key]
        out.append((a, encode_alignment(a, table, new_cost_factor)))
    out.sort(key=lambda t: -t[1].CD)
    return out


__all__ = ["OracleLimitError", "OracleLimits", "enumerate_alignments_bruteforce", "exact_key"]
