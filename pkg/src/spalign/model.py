"""Symbols, patterns and the store of Old patterns."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping


class Role(str, Enum):
    IDENTIFICATION = "identification"
    CONTENTS = "contents"


class Origin(str, Enum):
    USER = "user"
    LEARNED = "learned"


class StoreError(ValueError):
    """Raised when a pattern cannot be added to a store."""


@dataclass(frozen=True)
class SPSymbol:
    name: str
    role: Role = Role.CONTENTS

    @property
    def is_id(self) -> bool:
        return self.role is Role.IDENTIFICATION

    def __str__(self) -> str:
        return ("!" if self.is_id else "") + self.name


def symbol_name_problems(name: object) -> list[str]:
    if not isinstance(name, str) or not name:
        return ["empty symbol name"]
    problems = []
    if any(ch.isspace() for ch in name):
        problems.append(f"whitespace in symbol name {name!r}")
    if "|" in name:
        problems.append(f"'|' in symbol name {name!r}")
    return problems


@dataclass(frozen=True)
class SPPattern:
    id: str
    symbols: tuple[SPSymbol, ...]
    frequency: int = 1
    origin: Origin = Origin.USER

    @classmethod
    def from_tokens(
        cls,
        id: str,
        tokens: Iterable[str] | str,
        frequency: int = 1,
        origin: Origin = Origin.USER,
    ) -> "SPPattern":
        """Build a pattern from ``!``-marked tokens, e.g. ``"!A !12 fruit !#A"``."""
        if isinstance(tokens, str):
            tokens = tokens.split()
        symbols = []
        for tok in tokens:
            if tok.startswith("!") and len(tok) > 1:
                symbols.append(SPSymbol(tok[1:], Role.IDENTIFICATION))
            else:
                symbols.append(SPSymbol(tok, Role.CONTENTS))
        return cls(id, tuple(symbols), frequency, origin)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return " ".join(str(s) for s in self.symbols)


def validate_pattern(p: SPPattern) -> list[str]:
    """Return the invariant violations of ``p``; an empty list means ok."""
    problems = []
    if not isinstance(p.id, str) or not p.id or any(ch.isspace() for ch in p.id):
        problems.append("invalid id")
    if len(p.symbols) == 0:
        problems.append("empty pattern")
    if not isinstance(p.frequency, int) or p.frequency < 1:
        problems.append("frequency < 1")
    for s in p.symbols:
        problems.extend(symbol_name_problems(s.name))
        if not isinstance(s.role, Role):
            problems.append(f"bad role for {s.name!r}")
    return problems


@dataclass(frozen=True)
class KnowledgeStore:
    """An immutable collection of Old patterns keyed by id, in insertion order."""

    patterns: tuple[SPPattern, ...] = ()
    _index: Mapping[str, SPPattern] = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        index = {}
        for p in self.patterns:
            if p.id in index:
                raise StoreError(f"duplicate pattern id {p.id!r}")
            problems = validate_pattern(p)
            if problems:
                raise StoreError(f"invalid pattern {p.id!r}: {'; '.join(problems)}")
            index[p.id] = p
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def __contains__(self, pid: str) -> bool:
        return pid in self._index

    def __getitem__(self, pid: str) -> SPPattern:
        return self._index[pid]

    def ids(self) -> list[str]:
        return [p.id for p in self.patterns]

    def symbol_names(self) -> set[str]:
        return {s.name for p in self.patterns for s in p.symbols}


def add_old_pattern(store: KnowledgeStore, p: SPPattern) -> KnowledgeStore:
    if p.id in store:
        raise StoreError(f"duplicate pattern id {p.id!r}")
    problems = validate_pattern(p)
    if problems:
        raise StoreError(f"invalid pattern {p.id!r}: {'; '.join(problems)}")
    return KnowledgeStore(store.patterns + (p,))


@dataclass(frozen=True)
class NewInput:
    """New information: one or more patterns, always frequency 1 and all contents."""

    patterns: tuple[SPPattern, ...]

    def __post_init__(self):
        if not self.patterns:
            raise ValueError("New input needs at least one pattern")
        fixed = []
        for p in self.patterns:
            if not p.symbols:
                raise ValueError("empty New pattern")
            for s in p.symbols:
                problems = symbol_name_problems(s.name)
                if problems:
                    raise ValueError("; ".join(problems))
            fixed.append(
                SPPattern(
                    p.id,
                    tuple(SPSymbol(s.name, Role.CONTENTS) for s in p.symbols),
                    1,
                    p.origin,
                )
            )
        object.__setattr__(self, "patterns", tuple(fixed))

    @classmethod
    def from_strings(cls, *texts: str) -> "NewInput":
        return cls(
            tuple(
                SPPattern(f"new{i}", tuple(SPSymbol(t) for t in text.split()))
                for i, text in enumerate(texts)
            )
        )

    def __len__(self) -> int:
        return len(self.patterns)


@dataclass(frozen=True)
class FrequencyTable:
    counts: Mapping[str, int]
    total: int
    floor: int = 1

    def frequency(self, name: str) -> int:
        return self.counts.get(name, self.floor)


def frequency_table(store: KnowledgeStore | Iterable[SPPattern]) -> FrequencyTable:
    patterns = list(store)
    if not patterns:
        raise ValueError("no patterns")
    counts: Counter[str] = Counter()
    for p in patterns:
        for s in p.symbols:
            counts[s.name] += p.frequency
    return FrequencyTable(dict(counts), sum(counts.values()), 1)
