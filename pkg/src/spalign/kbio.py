"""Line-oriented knowledge-base format.

::

    # comment
    O <id> <freq> | <sym> <sym> ...     Old pattern; ``!sym`` is an ID symbol
    N | <sym> <sym> ...                 New pattern

Symbols starting with ``%`` are reserved for learned patterns.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .model import (
    KnowledgeStore,
    NewInput,
    Origin,
    SPPattern,
    SPSymbol,
    Role,
    symbol_name_problems,
)

RESERVED_PREFIX = "%"


class KBParseError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass(frozen=True)
class KBDocument:
    store: KnowledgeStore
    new: NewInput | None
    old_lines: tuple[int, ...] = ()
    new_lines: tuple[int, ...] = ()


_OLD = re.compile(r"^O\s+(\S+)\s+(\S+)\s*\|(.*)$")
_NEW = re.compile(r"^N\s*\|(.*)$")


def _symbols(body: str, lineno: int, allow_learned: bool) -> tuple[SPSymbol, ...]:
    out = []
    for tok in body.split():
        role = Role.CONTENTS
        name = tok
        if tok.startswith("!"):
            role, name = Role.IDENTIFICATION, tok[1:]
        problems = symbol_name_problems(name)
        if problems:
            raise KBParseError(lineno, problems[0])
        if name.startswith(RESERVED_PREFIX) and not allow_learned:
            raise KBParseError(lineno, f"reserved prefix in symbol {name!r}")
        out.append(SPSymbol(name, role))
    if not out:
        raise KBParseError(lineno, "empty pattern")
    return tuple(out)


def parse_document(text: str, allow_learned: bool = False) -> KBDocument:
    olds: list[SPPattern] = []
    news: list[SPPattern] = []
    old_lines, new_lines = [], []
    ids: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _OLD.match(line)
        if m:
            pid, freq_text, body = m.groups()
            try:
                freq = int(freq_text)
            except ValueError:
                raise KBParseError(lineno, f"frequency {freq_text!r} is not an integer") from None
            if freq < 1:
                raise KBParseError(lineno, "frequency < 1")
            if pid in ids:
                raise KBParseError(lineno, f"duplicate id {pid!r} (first on line {ids[pid]})")
            ids[pid] = lineno
            syms = _symbols(body, lineno, allow_learned)
            learned = any(s.name.startswith(RESERVED_PREFIX) for s in syms)
            origin = Origin.LEARNED if learned else Origin.USER
            olds.append(SPPattern(pid, syms, freq, origin))
            old_lines.append(lineno)
            continue
        m = _NEW.match(line)
        if m:
            syms = _symbols(m.group(1), lineno, allow_learned=False)
            news.append(SPPattern(f"n{len(news) + 1}", tuple(SPSymbol(s.name) for s in syms)))
            new_lines.append(lineno)
            continue
        raise KBParseError(lineno, "expected 'O <id> <freq> | ...' or 'N | ...'")
    return KBDocument(
        KnowledgeStore(tuple(olds)),
        NewInput(tuple(news)) if news else None,
        tuple(old_lines),
        tuple(new_lines),
    )


def parse_kb(text: str, allow_learned: bool = False) -> tuple[KnowledgeStore, NewInput | None]:
    doc = parse_document(text, allow_learned)
    return doc.store, doc.new


def serialize_kb(store: KnowledgeStore, new_input: NewInput | None = None) -> str:
    """Canonical text: Old records sorted by id, then New records in order."""
    lines = []
    for p in sorted(store, key=lambda p: p.id):
        lines.append(f"O {p.id} {p.frequency} | {p}")
    if new_input is not None:
        for p in new_input.patterns:
            lines.append("N | " + " ".join(p.names))
    return "\n".join(lines) + ("\n" if lines else "")


def fixture_names() -> list[str]:
    """Names of the knowledge bases shipped with the package."""
    root = resources.files(__package__) / "fixtures"
    return sorted(p.name[:-3] for p in root.iterdir() if p.name.endswith(".kb"))


def fixture_text(name: str) -> str:
    if name not in fixture_names():
        raise FileNotFoundError(f"no fixture named {name!r}")
    return (resources.files(__package__) / "fixtures" / f"{name}.kb").read_text(encoding="utf-8")


def load_fixture(name: str, allow_learned: bool = False) -> tuple[KnowledgeStore, NewInput | None]:
    return parse_kb(fixture_text(name), allow_learned)
