import re

import pytest

from spalign.alignment import linearize
from spalign.render import CONTINUED, render_alignment

from conftest import best


def column_groups(a):
    return {frozenset(e.row for e in c.entries) for c in a.columns}


def horizontal_groups(a, text):
    """Row sets joined by ``|`` runs, read back from text coordinates."""
    lines = text.rstrip("\n").split("\n")
    assert len(lines) == 2 * a.n_rows - 1, "expected a single chunk"
    grid = {}
    for r in range(a.n_rows):
        row_line = lines[2 * r]
        for m in re.finditer(r"\S+", row_line):
            grid[(2 * r, m.start())] = m.group()
        if r < a.n_rows - 1:
            for m in re.finditer(r"\|", lines[2 * r + 1]):
                grid[(2 * r + 1, m.start())] = "|"
    xs = sorted({x for (y, x), t in grid.items() if y % 2 == 1})
    groups = []
    for x in xs:
        cur = None
        for y in range(len(lines)):
            tok = grid.get((y, x))
            if tok is None:
                if cur:
                    groups.append(cur)
                cur = None
                continue
            cur = cur or set()
            if y % 2 == 0 and tok != "|":
                cur.add(y // 2)
        if cur:
            groups.append(cur)
    return {frozenset(g) for g in groups if len(g) > 1}


@pytest.mark.parametrize("name", ["fruit_flies", "kittens_noisy", "horse_phase1"])
def test_horizontal_connectors_join_column_members(name):
    a = best(name)[0]
    text = render_alignment(a, "h", width=1000)
    assert horizontal_groups(a, text) == column_groups(a)


def vertical_groups(a, text):
    lines = text.rstrip("\n").split("\n")
    header = lines[0]
    labels = [a.row_label(r) for r in range(a.n_rows)]
    starts, pos = [], 0
    for lab in labels:
        pos = header.index(lab, pos)
        starts.append(pos)
        pos += len(lab)
    widths = [starts[i + 1] - starts[i] - 1 for i in range(len(starts) - 1)] + [10**6]
    groups = set()
    for line in lines[1:]:
        cells = []
        for r, (s, w) in enumerate(zip(starts, widths)):
            cell = line[s:s + w]
            sep = line[s + w:s + w + 1] if r < len(starts) - 1 else ""
            cells.append((cell.rstrip(" ").rstrip("-") if cell.strip(" -") else "", sep == "-"))
        cur = set()
        for r, (name, joined) in enumerate(cells):
            if name:
                cur.add(r)
            if not joined:
                if len(cur) > 1:
                    groups.add(frozenset(cur))
                cur = set()
    return groups


@pytest.mark.parametrize("name", ["fruit_flies", "horse_phase1"])
def test_vertical_dashes_join_column_members(name):
    a = best(name)[0]
    text = render_alignment(a, "v", width=1000)
    assert vertical_groups(a, text) == column_groups(a)


def test_vertical_has_new_in_first_column():
    a = best("horse_phase1")[0]
    header = render_alignment(a, "v", width=1000).split("\n")[0]
    assert header.split()[0] == "New"


def test_horizontal_row_zero_is_the_sentence():
    a = best("fruit_flies")[0]
    first = render_alignment(a, "h", width=1000).split("\n")[0]
    assert first.split()[1:-1] == ["fruit", "flies", "like", "a", "banana"]


def test_every_slot_rendered_once():
    a = best("kittens")[0]
    text = render_alignment(a, "h", width=1000)
    names = [t for line in text.split("\n")[::2] for t in line.split()[1:-1] if t != "|"]
    # each row line shows every symbol of its row exactly once
    assert len(names) == sum(len(a.row_symbols(r)) for r in range(a.n_rows))


@pytest.mark.parametrize("orient", ["h", "v"])
def test_wrapping_marks_continuation(orient):
    a = best("fruit_flies")[0]
    text = render_alignment(a, orient, width=40)
    assert CONTINUED in text
    assert all(len(line) <= 40 for line in text.split("\n"))


@pytest.mark.parametrize("orient", ["h", "v"])
def test_render_is_deterministic(orient):
    a = best("horse_phase1")[0]
    assert render_alignment(a, orient) == render_alignment(a, orient)


def test_width_too_small():
    a = best("fruit_flies")[0]
    with pytest.raises(ValueError):
        render_alignment(a, "h", width=5)
    with pytest.raises(ValueError):
        render_alignment(a, "v", width=3)


def test_bad_orientation():
    with pytest.raises(ValueError):
        render_alignment(best("fruit_flies")[0], "diagonal")


def test_slot_count_matches_linearization():
    a = best("fruit_flies")[0]
    text = render_alignment(a, "v", width=1000)
    assert len(text.rstrip("\n").split("\n")) == 1 + len(linearize(a))
