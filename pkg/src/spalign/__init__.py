"""Pattern alignment by information compression.

Build multiple alignments of New patterns against a store of Old patterns,
score them by the bits they save, read off inferences and class hierarchies,
and learn grammars from raw sequences.
"""

from .align import SearchParams, build_multiple_alignment, pairwise_align
from .alignment import (
    Alignment,
    IllegalAlignment,
    MatchColumn,
    SymbolInstance,
    check_alignment_legal,
    flatten_alignment,
)
from .emit import emit_json
from .infer import (
    ClassificationReport,
    Inference,
    Level,
    classify,
    extract_inferences,
    inference_probabilities,
)
from .kbio import KBParseError, fixture_names, load_fixture, parse_kb, serialize_kb
from .learn import Grammar, LearnParams, assimilate, induce_grammar
from .model import (
    FrequencyTable,
    KnowledgeStore,
    NewInput,
    Origin,
    Role,
    SPPattern,
    SPSymbol,
    StoreError,
    add_old_pattern,
    frequency_table,
    validate_pattern,
)
from .oracle import OracleLimitError, OracleLimits, enumerate_alignments_bruteforce
from .render import Orientation, render_alignment
from .score import (
    AlignmentProbability,
    EncodingResult,
    GrammarScore,
    alignment_probabilities,
    encode_alignment,
    grammar_score,
)

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "AlignmentProbability",
    "ClassificationReport",
    "EncodingResult",
    "FrequencyTable",
    "Grammar",
    "GrammarScore",
    "IllegalAlignment",
    "Inference",
    "KBParseError",
    "KnowledgeStore",
    "LearnParams",
    "Level",
    "MatchColumn",
    "NewInput",
    "OracleLimitError",
    "OracleLimits",
    "Orientation",
    "Origin",
    "Role",
    "SPPattern",
    "SPSymbol",
    "SearchParams",
    "StoreError",
    "SymbolInstance",
    "add_old_pattern",
    "alignment_probabilities",
    "assimilate",
    "build_multiple_alignment",
    "check_alignment_legal",
    "classify",
    "emit_json",
    "encode_alignment",
    "enumerate_alignments_bruteforce",
    "extract_inferences",
    "fixture_names",
    "flatten_alignment",
    "frequency_table",
    "grammar_score",
    "induce_grammar",
    "inference_probabilities",
    "load_fixture",
    "pairwise_align",
    "parse_kb",
    "render_alignment",
    "serialize_kb",
    "validate_pattern",
]
