"""Plain-text drawings of alignments in two orientations.

Horizontal: one line per row, matched symbols stacked in the same text
column and joined by ``|``.  Vertical: one text column per row, one line per
position, matched symbols joined by runs of ``-``.
"""

from __future__ import annotations

from enum import Enum

from .alignment import Alignment, ensure_legal, linearize

CONTINUED = "\\"


class Orientation(str, Enum):
    HORIZONTAL = "h"
    VERTICAL = "v"


def _orientation(value) -> Orientation:
    if isinstance(value, Orientation):
        return value
    v = str(value).lower()
    if v in ("h", "horizontal"):
        return Orientation.HORIZONTAL
    if v in ("v", "vertical"):
        return Orientation.VERTICAL
    raise ValueError(f"unknown orientation {value!r}")


def _grid(a: Alignment):
    """Per slot: the names by row and the (min,max) row span of its column."""
    cells: list[dict[int, str]] = []
    spans: list[tuple[int, int] | None] = []
    for slot in linearize(a):
        if slot.column < 0:
            cells.append({slot.row: slot.name})
            spans.append(None)
        else:
            col = a.columns[slot.column]
            cells.append({e.row: col.symbol_name for e in col.entries})
            rows = col.rows()
            spans.append((min(rows), max(rows)))
    return cells, spans


def render_alignment(a: Alignment, orientation="h", width: int = 100) -> str:
    ensure_legal(a)
    if not isinstance(width, int) or width < 1:
        raise ValueError("width must be a positive integer")
    if _orientation(orientation) is Orientation.HORIZONTAL:
        return _horizontal(a, width)
    return _vertical(a, width)


def _horizontal(a: Alignment, width: int) -> str:
    cells, spans = _grid(a)
    n = a.n_rows
    tag = max(len(str(n - 1)), 1)
    labels = [a.row_label(r) for r in range(n)]
    lab_w = max(len(x) for x in labels)
    prefix, suffix = tag + 1, 1 + lab_w
    widths = [max(len(x) for x in c.values()) for c in cells]

    # split slots into chunks that fit in ``width``
    chunks, cur, used = [], [], 0
    room = width - prefix - suffix - 2
    for k, w in enumerate(widths):
        if w > room:
            raise ValueError(f"width {width} too small for symbol of length {w}")
        add = w + (1 if cur else 0)
        if cur and used + add > room:
            chunks.append(cur)
            cur, used, add = [], 0, w
        cur.append(k)
        used += add
    if cur:
        chunks.append(cur)

    blocks = []
    for ci, chunk in enumerate(chunks):
        last = ci == len(chunks) - 1
        lines = []
        for r in range(n):
            row_line, link_line = [], []
            for k in chunk:
                w = widths[k]
                name = cells[k].get(r)
                span = spans[k]
                through = span is not None and span[0] < r < span[1]
                if name is not None:
                    row_line.append(name.ljust(w))
                elif through:
                    row_line.append("|".ljust(w))
                else:
                    row_line.append(" " * w)
                below = span is not None and span[0] <= r < span[1]
                link_line.append(("|" if below else " ").ljust(w))
            end = " " + CONTINUED if not last else ""
            lines.append(f"{str(r).rjust(tag)} {' '.join(row_line)} {labels[r]}{end}".rstrip())
            if r < n - 1:
                lines.append((" " * prefix + " ".join(link_line)).rstrip())
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def _vertical(a: Alignment, width: int) -> str:
    cells, spans = _grid(a)
    n = a.n_rows
    labels = [a.row_label(r) for r in range(n)]
    col_w = []
    for r in range(n):
        names = [c[r] for c in cells if r in c]
        col_w.append(max([len(labels[r])] + [len(x) for x in names]))
    pos_w = len(str(len(cells)))

    # split rows into groups of text columns that fit in ``width``
    groups, cur, used = [], [], pos_w
    for r in range(n):
        add = col_w[r] + 1
        if col_w[r] + pos_w + 1 > width:
            raise ValueError(f"width {width} too small for row {r}")
        if cur and used + add > width:
            groups.append(cur)
            cur, used = [], pos_w
        cur.append(r)
        used += add
    if cur:
        groups.append(cur)

    blocks = []
    for gi, group in enumerate(groups):
        header = " " * pos_w + " " + " ".join(labels[r].ljust(col_w[r]) for r in group)
        lines = [header.rstrip()]
        for k, c in enumerate(cells):
            if not any(r in c for r in group):
                continue
            span = spans[k]
            parts = []
            for i, r in enumerate(group):
                w = col_w[r]
                name = c.get(r)
                inside = span is not None and span[0] <= r < span[1]
                fill = "-" if inside else " "
                if name is not None:
                    text = name + fill * (w - len(name))
                elif span is not None and span[0] < r < span[1]:
                    text = "-" * w
                else:
                    text = " " * w
                sep = fill if inside and i < len(group) - 1 else " "
                parts.append(text + sep)
            lines.append((str(k).rjust(pos_w) + " " + "".join(parts)).rstrip())
        if gi < len(groups) - 1:
            lines.append(CONTINUED)
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


__all__ = ["Orientation", "render_alignment"]
