"""Staged beam search for SP-multiple-alignments.

Each stage takes every retained partial alignment, flattens it into one
sequence and matches it, pairwise, against every Old pattern (adding a new
row) and against every New pattern not yet in row 0.  Only the
``beam_width`` alignments with the best compression difference survive a
stage.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterator, Optional, Sequence

from .alignment import (
    Alignment,
    MatchColumn,
    Slot,
    SymbolInstance,
    check_alignment_legal,
    linearize,
    sort_columns,
)
from .model import FrequencyTable, KnowledgeStore, NewInput, SPPattern, frequency_table
from .score import DEFAULT_NEW_COST_FACTOR, encode_alignment, symbol_cost

# Per-pair bonus so that, among matchings of equal gain, longer ones rank first.
_PAIR_BONUS = 1e-6


@dataclass(frozen=True)
class SearchParams:
    beam_width: int = 200
    max_alignments: int = 2
    max_instances_per_pattern: int = 10
    min_cd: float = 0.0
    max_stages: int = 20
    new_cost_factor: float = DEFAULT_NEW_COST_FACTOR

    def __post_init__(self):
        for name in ("beam_width", "max_alignments", "max_instances_per_pattern", "max_stages"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")


# ---------------------------------------------------------------------------
# pairwise matching


def iter_matchings(
    pairs: Sequence[tuple[int, int]],
    weights: Sequence[float],
    conflict: Optional[Callable[[int, int], bool]] = None,
) -> Iterator[tuple[float, tuple[tuple[int, int], ...]]]:
    """Yield every admissible chain of ``pairs`` in decreasing total weight.

    ``pairs`` are (driver index, target index) tuples.  A chain is strictly
    increasing in the target index; ``conflict(i, k)`` says whether driver
    item ``k`` may not follow driver item ``i`` (default: unless ``k > i``).
    Every pair of a chain is checked against every earlier one.  Best-first
    search with an admissible completion bound, so chains come out in order.
    """
    if conflict is None:
        conflict = lambda i, k: k <= i  # noqa: E731
    order = sorted(range(len(pairs)), key=lambda k: (pairs[k][1], pairs[k][0]))
    pairs = [pairs[k] for k in order]
    weights = [weights[k] for k in order]
    n = len(pairs)
    after: list[list[int]] = [[] for _ in range(n)]
    for a in range(n):
        ia, ja = pairs[a]
        for b in range(a + 1, n):
            ib, jb = pairs[b]
            if jb > ja and not conflict(ia, ib):
                after[a].append(b)
    best = [0.0] * n
    for a in range(n - 1, -1, -1):
        tail = max((best[b] for b in after[a]), default=0.0)
        best[a] = weights[a] + max(0.0, tail)

    heap: list = []
    for a in range(n):
        heapq.heappush(heap, (-best[a], (a,), 1, weights[a]))
    while heap:
        negp, chain, open_, g = heapq.heappop(heap)
        if not open_:
            yield g, tuple(pairs[k] for k in chain)
            continue
        heapq.heappush(heap, (-g, chain, 0, g))
        for b in after[chain[-1]]:
            ib = pairs[b][0]
            if any(conflict(pairs[c][0], ib) for c in chain[:-1]):
                continue
            heapq.heappush(heap, (-(g + best[b]), chain + (b,), 1, g + weights[b]))


def pairwise_align(
    driver: Sequence[str],
    target: SPPattern,
    table: FrequencyTable,
    k: int = 200,
    weight: Optional[Callable[[int, int], Optional[float]]] = None,
) -> list[tuple[tuple[int, int], ...]]:
    """Top-``k`` order-preserving matchings of ``driver`` against ``target``.

    Matchings pair equal symbol names and are ranked by summed bit cost of
    the matched symbols.  ``weight(i, j)`` may override the per-pair value,
    returning None to forbid a pair.
    """
    pairs, weights = [], []
    tnames = target.names
    for i, name in enumerate(driver):
        for j, tname in enumerate(tnames):
            if tname != name:
                continue
            w = symbol_cost(table, name) if weight is None else weight(i, j)
            if w is None:
                continue
            pairs.append((i, j))
            weights.append(w + _PAIR_BONUS)
    out = []
    for _, chain in iter_matchings(pairs, weights):
        out.append(chain)
        if len(out) >= k:
            break
    return out


# ---------------------------------------------------------------------------
# canonical form


def _label(a: Alignment, e: SymbolInstance, inst_of=None) -> tuple:
    if e.row == 0:
        offsets = a.new_offsets()
        b = max(i for i, off in enumerate(offsets) if off <= e.position)
        return ("@" + a.new_patterns[b].id, 0, e.position - offsets[b])
    inst = inst_of[e.row] if inst_of else 0
    return (a.rows[e.row - 1].id, inst, e.position)


def canonical_key(a: Alignment) -> str:
    """Serialisation that ignores row order and instance numbering."""
    partners: dict[int, list] = {r: [] for r in range(1, a.n_rows)}
    for col in a.columns:
        labels = [_label(a, e) for e in col.entries]
        for e in col.entries:
            if e.row:
                others = sorted(l for l, f in zip(labels, col.entries) if f != e)
                partners[e.row].append((e.position, tuple(others)))
    sig = {
        r: (a.rows[r - 1].id, tuple(sorted(partners[r])))
        for r in range(1, a.n_rows)
    }
    inst_of: dict[int, int] = {}
    counters: dict[str, int] = {}
    for r in sorted(sig, key=lambda r: (sig[r], r)):
        pid = a.rows[r - 1].id
        counters[pid] = counters.get(pid, 0) + 1
        inst_of[r] = counters[pid]
    cols = sorted(
        tuple(sorted(_label(a, e, inst_of) for e in col.entries)) for col in a.columns
    )
    rows = sorted((a.rows[r - 1].id, inst_of[r]) for r in range(1, a.n_rows))
    return repr((tuple(p.id for p in a.new_patterns), tuple(rows), tuple(cols)))


# ---------------------------------------------------------------------------
# beam search


class _Partial:
    __slots__ = ("alignment", "cd", "key", "_slots", "_anc")

    def __init__(self, alignment: Alignment, cd: float, key: str):
        self.alignment = alignment
        self.cd = cd
        self.key = key
        self._slots = None
        self._anc = None

    @property
    def slots(self) -> list[Slot]:
        if self._slots is None:
            self._slots = linearize(self.alignment)
        return self._slots

    @property
    def ancestors(self) -> list[int]:
        if self._anc is None:
            self._anc = _ancestors(self.alignment, self.slots)
        return self._anc

    def rank(self):
        return (-self.cd, self.alignment.n_rows, -len(self.alignment.columns), self.key)


def _ancestors(a: Alignment, slots: list[Slot]) -> list[int]:
    """Bitset of the slots that must precede each slot (row order only)."""
    index = {}
    for si, slot in enumerate(slots):
        if slot.column >= 0:
            for e in a.columns[slot.column].entries:
                index[(e.row, e.position)] = si
        else:
            index[(slot.row, slot.position)] = si
    preds: list[list[int]] = [[] for _ in slots]
    for r in range(a.n_rows):
        prev = None
        for p in range(len(a.row_symbols(r))):
            si = index[(r, p)]
            if prev is not None:
                preds[si].append(prev)
            prev = si
    anc = [0] * len(slots)
    for si in range(len(slots)):  # slots are in topological order
        acc = 0
        for q in preds[si]:
            acc |= anc[q] | (1 << q)
        anc[si] = acc
    return anc


def _extend_with_old(
    a: Alignment, slots: list[Slot], target: SPPattern, chain
) -> Alignment:
    R = a.n_rows
    used = dict(chain)
    columns = []
    for si, slot in enumerate(slots):
        j = used.get(si)
        if slot.column >= 0:
            col = a.columns[slot.column]
            if j is not None:
                col = MatchColumn(col.entries + (SymbolInstance(R, j),), col.symbol_name)
            columns.append(col)
        elif j is not None:
            columns.append(
                MatchColumn(
                    (SymbolInstance(slot.row, slot.position), SymbolInstance(R, j)),
                    slot.name,
                )
            )
    inst = 1 + max((k for p, k in zip(a.rows, a.instances) if p.id == target.id), default=0)
    return sort_columns(
        Alignment(a.new_patterns, a.rows + (target,), a.instances + (inst,), tuple(columns))
    )


def _extend_with_new(
    a: Alignment, slots: list[Slot], block: SPPattern, t: int, chain
) -> Alignment:
    offsets = a.new_offsets()
    start = offsets[t] if t < len(offsets) else sum(len(p) for p in a.new_patterns)
    shift = len(block)

    def moved(e: SymbolInstance) -> SymbolInstance:
        if e.row == 0 and e.position >= start:
            return SymbolInstance(0, e.position + shift)
        return e

    used = dict(chain)
    columns = []
    for si, slot in enumerate(slots):
        j = used.get(si)
        if slot.column >= 0:
            col = a.columns[slot.column]
            entries = tuple(moved(e) for e in col.entries)
            if j is not None:
                entries = (SymbolInstance(0, start + j),) + entries
            columns.append(MatchColumn(entries, col.symbol_name))
        elif j is not None:
            columns.append(
                MatchColumn(
                    (SymbolInstance(0, start + j), SymbolInstance(slot.row, slot.position)),
                    slot.name,
                )
            )
    blocks = a.new_patterns[:t] + (block,) + a.new_patterns[t:]
    return sort_columns(Alignment(blocks, a.rows, a.instances, tuple(columns)))


def _join(a: Alignment, other: Alignment, t: int) -> Alignment:
    """Disjoint union of ``a`` and ``other``, whose New blocks go in at ``t``."""
    offsets = a.new_offsets()
    start = offsets[t] if t < len(offsets) else sum(len(p) for p in a.new_patterns)
    shift = sum(len(p) for p in other.new_patterns)
    R = a.n_rows

    def moved(e: SymbolInstance) -> SymbolInstance:
        if e.row == 0:
            return SymbolInstance(0, e.position + shift) if e.position >= start else e
        return e

    def placed(e: SymbolInstance) -> SymbolInstance:
        if e.row == 0:
            return SymbolInstance(0, start + e.position)
        return SymbolInstance(R - 1 + e.row, e.position)

    columns = [MatchColumn(tuple(moved(e) for e in c.entries), c.symbol_name) for c in a.columns]
    columns += [MatchColumn(tuple(placed(e) for e in c.entries), c.symbol_name) for c in other.columns]
    top: dict[str, int] = {}
    for p, k in zip(a.rows, a.instances):
        top[p.id] = max(top.get(p.id, 0), k)
    instances = list(a.instances)
    for p in other.rows:
        top[p.id] = top.get(p.id, 0) + 1
        instances.append(top[p.id])
    blocks = a.new_patterns[:t] + other.new_patterns + a.new_patterns[t:]
    return sort_columns(Alignment(blocks, a.rows + other.rows, tuple(instances), tuple(columns)))


def _gainful_chains(pairs, gains, conflict):
    """Admissible chains in decreasing gain, one per set of gainful pairs.

    Pairs worth nothing (contents meeting contents) would only multiply
    equal-scoring variants, so each chain of gainful pairs is padded greedily
    with whatever zero-gain pairs still fit.
    """
    paid = [k for k, g in enumerate(gains) if g > 0]
    free = sorted((pairs[k] for k, g in enumerate(gains) if g <= 0), key=lambda p: (p[1], p[0]))
    gain_of = {pairs[k]: gains[k] for k in paid}

    def fits(p, chosen):
        i, j = p
        for i2, j2 in chosen:
            if j2 == j or i2 == i:
                return False
            if j2 < j and conflict(i2, i):
                return False
            if j2 > j and conflict(i, i2):
                return False
        return True

    def pad(chain):
        chosen = list(chain)
        for p in free:
            if fits(p, chosen):
                chosen.append(p)
        return tuple(sorted(chosen, key=lambda p: p[1]))

    if paid:
        sub_pairs = [pairs[k] for k in paid]
        sub_w = [gains[k] for k in paid]
        for _, chain in iter_matchings(sub_pairs, sub_w, conflict):
            yield math.fsum(gain_of[p] for p in chain), pad(chain)
    if free:
        yield 0.0, pad(())


class _Searcher:
    def __init__(self, new_input: NewInput, store: KnowledgeStore, params: SearchParams, table):
        self.new_input = new_input
        self.store = store
        self.params = params
        self.table = table
        self.factor = params.new_cost_factor
        self._cost: dict[str, float] = {}
        # best alignments found for each New block on its own
        self.singles: dict[str, list[_Partial]] = {}
        self.id_cost = {
            p.id: math.fsum(self.cost(s.name) for s in p.symbols if s.is_id) for p in store
        }

    def cost(self, name: str) -> float:
        c = self._cost.get(name)
        if c is None:
            c = self._cost[name] = symbol_cost(self.table, name)
        return c

    # candidate generators yield (cd, builder) lazily in decreasing cd order

    def old_candidates(self, part: _Partial, target: SPPattern):
        a = part.alignment
        if a.pattern_counts().get(target.id, 0) >= self.params.max_instances_per_pattern:
            return
        slots = part.slots
        tsyms = target.symbols
        same_pos = {}
        has_id = {}
        for ci, col in enumerate(a.columns):
            same_pos[ci] = {
                e.position for e in col.entries if e.row and a.rows[e.row - 1].id == target.id
            }
            has_id[ci] = any(
                e.row and a.rows[e.row - 1].symbols[e.position].is_id for e in col.entries
            )
        pairs, gains = [], []
        for si, slot in enumerate(slots):
            for j, ts in enumerate(tsyms):
                if ts.name != slot.name:
                    continue
                c = self.cost(slot.name)
                if slot.column < 0:
                    if slot.row == 0:
                        g = self.factor * c + (c if ts.is_id else 0.0)
                    else:
                        if a.rows[slot.row - 1].id == target.id and slot.position == j:
                            continue
                        slot_id = a.rows[slot.row - 1].symbols[slot.position].is_id
                        if slot_id and ts.is_id:
                            continue
                        g = c if (slot_id or ts.is_id) else 0.0
                else:
                    if j in same_pos[slot.column]:
                        continue
                    if ts.is_id and has_id[slot.column]:
                        continue
                    g = c if ts.is_id else 0.0
                pairs.append((si, j))
                gains.append(g)
        if not pairs:
            return
        anc = part.ancestors
        conflict = lambda i, k: i == k or (anc[i] >> k) & 1  # noqa: E731
        base = part.cd - self.id_cost[target.id]
        for g, chain in _gainful_chains(pairs, gains, conflict):
            yield base + g, base + g, (
                lambda chain=chain: _extend_with_old(a, slots, target, chain)
            )

    def new_candidates(self, part: _Partial, block: SPPattern):
        a = part.alignment
        slots = part.slots
        offsets = a.new_offsets()
        block_of_slot = {}
        for si, slot in enumerate(slots):
            pos = None
            if slot.column < 0 and slot.row == 0:
                pos = slot.position
            elif slot.column >= 0:
                e = a.columns[slot.column].entry_for(0)
                pos = e.position if e else None
            if pos is not None:
                block_of_slot[si] = max(i for i, off in enumerate(offsets) if off <= pos)
        nblocks = len(a.new_patterns)
        anc = part.ancestors
        for t in range(nblocks + 1):
            # the block goes after every row-0 slot of blocks < t and before the rest
            later = 0
            earlier_anc = 0
            for si, b in block_of_slot.items():
                if b >= t:
                    later |= 1 << si
                else:
                    earlier_anc |= anc[si]
            pairs, gains = [], []
            for si, slot in enumerate(slots):
                if si in block_of_slot or anc[si] & later or (earlier_anc >> si) & 1:
                    continue
                for j, s in enumerate(block.symbols):
                    if s.name != slot.name:
                        continue
                    c = self.cost(s.name)
                    g = self.factor * c
                    if slot.column < 0 and a.rows[slot.row - 1].symbols[slot.position].is_id:
                        g += c
                    pairs.append((si, j))
                    gains.append(g)
            if not pairs:
                continue
            conflict = lambda i, k: i == k or (anc[i] >> k) & 1  # noqa: E731
            for g, chain in _gainful_chains(pairs, gains, conflict):
                yield part.cd + g, part.cd + g, (
                    lambda chain=chain, t=t: _extend_with_new(a, slots, block, t, chain)
                )

    def join_candidates(self, part: _Partial, block: SPPattern):
        """Add an unconsumed block together with an alignment found for it alone."""
        a = part.alignment
        order = {p.id: k for k, p in enumerate(self.new_input.patterns)}
        t = sum(1 for p in a.new_patterns if order[p.id] < order[block.id])
        counts = a.pattern_counts()
        cap = self.params.max_instances_per_pattern
        for other in self.singles.get(block.id, ()):
            extra = other.alignment.pattern_counts()
            if any(counts.get(pid, 0) + n > cap for pid, n in extra.items()):
                continue
            cd = part.cd + other.cd
            yield cd, cd, (lambda other=other: _join(a, other.alignment, t))

    def _remember_singles(self, beam: list[_Partial]) -> None:
        for part in beam:
            a = part.alignment
            if len(a.new_patterns) == 1 and a.rows:
                lst = self.singles.setdefault(a.new_patterns[0].id, [])
                if all(p.key != part.key for p in lst):
                    lst.append(part)
        for bid, lst in self.singles.items():
            lst.sort(key=_Partial.rank)
            del lst[self.params.beam_width:]

    def run(self) -> list[_Partial]:
        params = self.params
        width = params.beam_width
        seeds = [
            _Partial(Alignment((p,), (), (), ()), 0.0, "seed:" + p.id)
            for p in self.new_input.patterns
        ]
        beam: list[_Partial] = []
        sources = seeds
        for stage in range(params.max_stages):
            pool: list = []  # min-heap of (cd, -rows, -seq, partial-or-builder)
            cap = 2 * width
            seq = 0
            for part in beam:
                heapq.heappush(pool, (part.cd, -part.alignment.n_rows, -seq, part))
                seq += 1
            for part in sources:
                used_new = {p.id for p in part.alignment.new_patterns}
                gens = [self.old_candidates(part, o) for o in self.store]
                if stage > 0:
                    for b in self.new_input.patterns:
                        if b.id not in used_new:
                            gens.append(self.new_candidates(part, b))
                            gens.append(self.join_candidates(part, b))
                for gen in gens:
                    taken = 0
                    for bound, cd, build in gen:
                        if len(pool) >= cap and bound < pool[0][0] - 1e-9:
                            break
                        item = (cd, -(part.alignment.n_rows + 1), -seq, build)
                        seq += 1
                        if len(pool) < cap:
                            heapq.heappush(pool, item)
                        elif item[:3] > pool[0][:3]:
                            heapq.heapreplace(pool, item)
                        taken += 1
                        if taken >= width:
                            break
            merged: dict[str, _Partial] = {}
            for cd, _, _, x in sorted(pool, key=lambda it: (-it[0], -it[1], -it[2])):
                if isinstance(x, _Partial):
                    part = x
                else:
                    al = x()
                    part = _Partial(al, cd, canonical_key(al))
                if part.key not in merged:
                    merged[part.key] = part
            new_beam = sorted(merged.values(), key=_Partial.rank)[:width]
            if [p.key for p in new_beam] == [p.key for p in beam]:
                break
            beam = new_beam
            sources = beam
            self._remember_singles(beam)
        return beam


def build_multiple_alignment(
    new_input: NewInput,
    store: KnowledgeStore,
    params: SearchParams | None = None,
    table: FrequencyTable | None = None,
) -> list[Alignment]:
    """Best alignments of ``new_input`` against ``store``, highest CD first."""
    params = params or SearchParams()
    if not len(store):
        raise ValueError("empty store")
    if new_input is None or not len(new_input):
        raise ValueError("empty input")
    table = table or frequency_table(store)
    beam = _Searcher(new_input, store, params, table).run()
    scored = []
    for part in beam:
        a = part.alignment
        if check_alignment_legal(a):
            continue
        enc = encode_alignment(a, table, params.new_cost_factor)
        if enc.CD < params.min_cd:
            continue
        scored.append((-enc.CD, a.n_rows, -len(a.columns), part.key, replace(a, score=enc)))
    scored.sort(key=lambda x: x[:4])
    return [x[-1] for x in scored[: params.max_alignments]]
