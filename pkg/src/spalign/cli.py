"""Command-line interface: ``spalign <command> [options]``.

Exit status is 0 on success, 1 on a usage error and 2 on a data error
(unreadable or malformed knowledge base, bad input, oversized oracle run).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .align import SearchParams, build_multiple_alignment
from .alignment import IllegalAlignment, flatten_alignment
from .emit import emit_json
from .infer import classify, extract_inferences, inference_probabilities
from .kbio import KBParseError, fixture_names, fixture_text, parse_kb, serialize_kb
from .learn import LearnParams, induce_grammar
from .model import KnowledgeStore, NewInput, SPPattern, SPSymbol, StoreError
from .oracle import OracleLimitError, OracleLimits, enumerate_alignments_bruteforce
from .render import render_alignment
from .score import alignment_probabilities

USAGE_ERROR = 1
DATA_ERROR = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kb", metavar="FILE",
                   help="knowledge base file, or the name of a bundled fixture")
    p.add_argument("--new", action="append", metavar='"SYM ..."',
                   help="a New pattern; repeat for several (replaces the KB's N records)")
    p.add_argument("--new-file", metavar="FILE",
                   help="file with one New pattern per non-empty line")
    p.add_argument("--beam", type=int, default=None, metavar="N", help="beam width")
    p.add_argument("--max-alignments", type=int, default=None, metavar="K")
    p.add_argument("--min-cd", type=float, default=None, metavar="X")
    p.add_argument("--max-reuse", type=int, default=None, metavar="N",
                   help="maximum instances of one Old pattern in an alignment")
    p.add_argument("--orient", choices=("h", "v"), default="h")
    p.add_argument("--width", type=int, default=100, help="render width in characters")
    p.add_argument("--json", action="store_true", help="write JSON instead of text")
    p.add_argument("--out", metavar="FILE", help="write output here instead of stdout")
    p.add_argument("--allow-learned", action="store_true",
                   help="accept %%-prefixed learned symbols in the KB")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spalign", description="SP-multiple-alignment engine")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("align", "best alignments with their scores"),
        ("infer", "alignments plus the inferences they support"),
        ("classify", "class hierarchy recognised in the best alignment"),
        ("render", "draw the best alignments"),
        ("oracle", "enumerate every alignment of a tiny instance"),
    ):
        _shared(sub.add_parser(name, help=text, description=text))
    learn = sub.add_parser("learn", help="induce a grammar from a corpus",
                           description="induce a grammar from a corpus of New patterns")
    _shared(learn)
    learn.add_argument("--grammar-beam", type=int, default=None, metavar="N")
    learn.add_argument("--max-rounds", type=int, default=None, metavar="N")
    return parser


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot read {path}: {e.strerror or e}") from None
    except UnicodeDecodeError:
        raise DataError(f"{path} is not UTF-8 text") from None


def _kb_text(source: str) -> str:
    if Path(source).exists() or source not in fixture_names():
        return _read(source)
    return fixture_text(source)


def _new_patterns(args) -> list[SPPattern] | None:
    texts: list[str] = []
    if getattr(args, "new", None):
        texts.extend(args.new)
    if getattr(args, "new_file", None):
        for line in _read(args.new_file).splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                texts.append(line)
    if not texts:
        return None
    out = []
    for i, t in enumerate(texts):
        names = t.split()
        if not names:
            raise UsageError("--new needs at least one symbol")
        if any(n.startswith("%") for n in names):
            raise DataError(f"New pattern {i}: reserved prefix '%'")
        out.append(SPPattern(f"new{i}", tuple(SPSymbol(n) for n in names)))
    return out


def _load(args) -> tuple[KnowledgeStore, NewInput | None]:
    store, new = KnowledgeStore(()), None
    if args.kb:
        store, new = parse_kb(_kb_text(args.kb), allow_learned=args.allow_learned)
    given = _new_patterns(args)
    if given:
        new = NewInput(tuple(given))
    return store, new


def _params(args) -> SearchParams:
    kw = {}
    for flag, field in (("beam", "beam_width"), ("max_alignments", "max_alignments"),
                        ("max_reuse", "max_instances_per_pattern"), ("min_cd", "min_cd")):
        v = getattr(args, flag)
        if v is not None:
            kw[field] = v
    try:
        return SearchParams(**kw)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _need_input(store, new) -> NewInput:
    if not len(store):
        raise UsageError("a non-empty --kb is required")
    if new is None:
        raise UsageError("no New input: give --new, --new-file or N records in the KB")
    return new


def _score_line(k: int, a, p_rel: float) -> str:
    e = a.score
    return (f"alignment {k}: CD={e.CD:.6f} BN={e.BN:.6f} BE={e.BE:.6f} p_rel={p_rel:.6f} "
            f"patterns={' '.join(a.old_multiset())}")


def cmd_align(args, *, draw: bool = False, inferences: bool = False) -> str:
    store, new = _load(args)
    new = _need_input(store, new)
    results = build_multiple_alignment(new, store, _params(args))
    if args.json:
        return emit_json(results)
    if not results:
        return "no alignment reaches the minimum CD\n"
    probs = alignment_probabilities([(a, a.score) for a in results])
    inf_p = inference_probabilities(list(zip(results, probs))) if inferences else {}
    lines = []
    for k, (a, pr) in enumerate(zip(results, probs)):
        lines.append(_score_line(k, a, pr.p_rel))
        lines.append("  code: " + " ".join(a.score.code))
        if draw:
            lines.append(render_alignment(a, args.orient, args.width).rstrip("\n"))
        else:
            lines.append("  flat: " + " ".join(flatten_alignment(a)))
        if inferences:
            for inf in extract_inferences(a):
                lines.append(f"  infer {inf.symbol} from {inf.source_pattern} "
                             f"p={inf_p[inf.key]:.6f}")
        lines.append("")
    return "\n".join(lines)


def cmd_classify(args) -> str:
    store, new = _load(args)
    new = _need_input(store, new)
    report = classify(new, store, _params(args))
    if args.json:
        levels = [
            {"pattern": lv.pattern_id, "row": lv.row,
             "matched_id_symbols": list(lv.matched_id_symbols)}
            for lv in report.levels
        ]
        shown = [report.alignment] if report.alignment is not None else []
        return emit_json(shown, {"classification": levels})
    if not report.levels:
        return "no alignment reaches the minimum CD\n"
    lines = ["most specific first:"]
    for depth, lv in enumerate(report.levels):
        ids = " ".join(lv.matched_id_symbols) or "-"
        lines.append(f"  {depth}: {lv.pattern_id} (row {lv.row}; matched ids: {ids})")
    return "\n".join(lines) + "\n"


def cmd_learn(args) -> str:
    store, new = _load(args)
    if new is None:
        raise UsageError("learn needs a corpus: --new, --new-file or N records in --kb")
    corpus = [NewInput((p,)) for p in new.patterns]
    lkw = {}
    if args.grammar_beam is not None:
        lkw["grammar_beam"] = args.grammar_beam
    if args.max_rounds is not None:
        lkw["max_rounds"] = args.max_rounds
    try:
        lparams = LearnParams(**lkw)
    except ValueError as e:
        raise UsageError(str(e)) from None
    grammar, score = induce_grammar(corpus, lparams, _params(args))
    if args.json:
        pats = [
            {"id": p.id, "frequency": p.frequency,
             "symbols": [("!" if s.is_id else "") + s.name for s in p.symbols]}
            for p in grammar.patterns
        ]
        return emit_json([], {"grammar": pats, "g": score.G, "e": score.E,
                              "total": score.total, "stage_totals": list(grammar.stage_totals)})
    head = (f"# G={score.G:.6f} E={score.E:.6f} total={score.total:.6f}\n"
            f"# stage totals: {' '.join(f'{t:.6f}' for t in grammar.stage_totals)}\n")
    return head + serialize_kb(grammar.store())


def cmd_oracle(args) -> str:
    store, new = _load(args)
    new = _need_input(store, new)
    limits = OracleLimits(max_instances_per_pattern=args.max_reuse or 1)
    found = enumerate_alignments_bruteforce(new, store, limits)
    params = _params(args)
    shown = [a.__class__(a.new_patterns, a.rows, a.instances, a.columns, enc) for a, enc in found]
    shown = [a for a in shown if a.score.CD >= params.min_cd][: params.max_alignments]
    if args.json:
        return emit_json(shown, {"total_alignments": len(found)})
    lines = [f"{len(found)} legal alignments"]
    probs = alignment_probabilities([(a, a.score) for a in shown]) if shown else []
    for k, (a, pr) in enumerate(zip(shown, probs)):
        lines.append(_score_line(k, a, pr.p_rel))
    return "\n".join(lines) + "\n"


_COMMANDS = {
    "align": cmd_align,
    "infer": lambda a: cmd_align(a, inferences=True),
    "render": lambda a: cmd_align(a, draw=True),
    "classify": cmd_classify,
    "learn": cmd_learn,
    "oracle": cmd_oracle,
}


def run(argv: list[str] | None = None) -> str:
    """Run one command and return its output text (errors propagate)."""
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # --help or a usage error
        return int(e.code or 0)
    try:
        text = _COMMANDS[args.command](args)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return 0
    except UsageError as e:
        print(f"spalign: error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except (DataError, KBParseError, StoreError, OracleLimitError, IllegalAlignment,
            ValueError, OSError) as e:
        print(f"spalign: error: {e}", file=sys.stderr)
        return DATA_ERROR


def console() -> None:
    sys.exit(main())


__all__ = ["build_parser", "main", "run"]


if __name__ == "__main__":
    console()
