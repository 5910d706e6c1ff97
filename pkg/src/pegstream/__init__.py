"""Streaming PEG/GTDPL parsing with progressive prefix tables.

The pipeline: ``grammar`` turns surface PEG text into a core rule
program; ``oracle`` holds the classical full-table reference semantics;
``table``/``fixpoint`` maintain prefix tables incrementally; ``expand``
turns resolved table cells into bit-coded parse decisions; ``driver``
glues it all into a byte-at-a-time Parser; ``cli`` is the command line.
"""

from .driver import ACCEPT, REJECT, Parser, Stats, classify_immediate, parse_bytes
from .expand import INFINITE, DivergenceError, ExpansionState
from .grammar import GrammarError, Program, desugar, load_program, parse_grammar
from .oracle import build_code, decode, full_table, match, tree_size
from .table import BOTTOM, END_MARK, FAIL, PrefixTable

__all__ = [
    "ACCEPT", "REJECT", "Parser", "Stats", "classify_immediate", "parse_bytes",
    "INFINITE", "DivergenceError", "ExpansionState",
    "GrammarError", "Program", "desugar", "load_program", "parse_grammar",
    "build_code", "decode", "full_table", "match", "tree_size",
    "BOTTOM", "END_MARK", "FAIL", "PrefixTable",
]

__version__ = "0.1.0"
