"""Deterministic JSON output of scored alignments.

Numbers are written with exactly six decimals and keys in a fixed order, so
two runs on the same input give byte-identical text.
"""

from __future__ import annotations

import json
from decimal import Decimal
from typing import Sequence

from .alignment import Alignment, ensure_legal
from .infer import extract_inferences, inference_probabilities
from .score import alignment_probabilities


class _Num:
    """A number already formatted as text."""

    def __init__(self, text: str):
        self.text = text


def _fixed(x: float) -> _Num:
    text = f"{x:.6f}"
    if text == "-0.000000":
        text = "0.000000"
    return _Num(text)


def _dump(obj, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, _Num):
        return obj.text
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [f"{inner}{json.dumps(k)}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (str, int)) for v in obj):
            return "[" + ", ".join(json.dumps(v) for v in obj) + "]"
        parts = [inner + _dump(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    return json.dumps(obj, ensure_ascii=False)


def _entry_list(entries) -> _Num:
    # one compact line per column keeps the file readable
    return _Num("[" + ", ".join(f'{{"row": {e.row}, "pos": {e.position}}}' for e in entries) + "]")


def alignments_document(alignments: Sequence[Alignment]) -> dict:
    """The JSON document as plain Python data (numbers pre-formatted)."""
    for a in alignments:
        ensure_legal(a)
        if a.score is None:
            raise ValueError("alignment has no score")
    if not alignments:
        return {"alignments": []}
    probs = alignment_probabilities([(a, a.score) for a in alignments])
    inf_p = inference_probabilities(list(zip(alignments, probs)))
    out = []
    for a, pr in zip(alignments, probs):
        enc = a.score
        bn, be = _fixed(enc.BN), _fixed(enc.BE)
        # cd is printed as the difference of the printed bn and be
        cd = _Num(f"{Decimal(bn.text) - Decimal(be.text):.6f}".replace("-0.000000", "0.000000"))
        rows = [{"id": "New", "instance": 0, "symbols": [s.name for s in a.row_symbols(0)]}]
        for r in range(1, a.n_rows):
            rows.append({
                "id": a.rows[r - 1].id,
                "instance": a.instances[r - 1],
                "symbols": [("!" if s.is_id else "") + s.name for s in a.row_symbols(r)],
            })
        columns = [
            {"symbol": col.symbol_name, "entries": _entry_list(sorted(col.entries))}
            for col in a.columns
        ]
        infs = [
            {
                "symbol": inf.symbol,
                "source_pattern": inf.source_pattern,
                "probability": _fixed(inf_p[inf.key]),
            }
            for inf in sorted(extract_inferences(a), key=lambda i: (i.source_row, i.symbol))
        ]
        out.append({
            "rows": rows,
            "columns": columns,
            "bn": bn,
            "be": be,
            "cd": cd,
            "p_abs": _fixed(pr.p_abs),
            "p_rel": _fixed(pr.p_rel),
            "inferences": infs,
        })
    return {"alignments": out}


def emit_json(alignments: Sequence[Alignment], extra: dict | None = None) -> str:
    """Render scored alignments (best first) as stable JSON text.

    ``extra`` adds top-level keys after ``alignments``; float values in it are
    written with six decimals too.
    """
    doc = alignments_document(alignments)
    for k, v in (extra or {}).items():
        doc[k] = _numbers(v)
    return _dump(doc, 0) + "\n"


def _numbers(v):
    if isinstance(v, float):
        return _fixed(v)
    if isinstance(v, dict):
        return {k: _numbers(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_numbers(x) for x in v]
    return v


__all__ = ["alignments_document", "emit_json"]
