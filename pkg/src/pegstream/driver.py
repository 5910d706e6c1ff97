"""Byte-at-a-time streaming parser: table update, expansion, truncation.

Each fed byte extends the prefix table, lets the expansion advance as far
as the table supports, then drops every column behind the new offset —
after a feed the table base and the expansion offset coincide. Bits come
out as '0'/'1' characters in chunks; their concatenation over a whole
accepted input equals the bit code the oracle builds from the full table.

One Parser serves one stream. Nothing is shared between instances, and an
instance may move between threads between calls.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expand import INFINITE, ExpansionState, StepStats, run_to_quiescence
from .fixpoint import RevDeps, fix
from .grammar import K_EPS, K_FAIL, K_TERNARY
from .table import END_MARK, PrefixTable

ACCEPT = "accept"
REJECT = "reject"


@dataclass
class Stats:
    max_cols: int = 0
    resolved_entries: int = 0
    non_immediate_entries: int = 0
    speculation_steps: int = 0
    visited_entries: int = 0
    expansion_steps: int = 0


def classify_immediate(program):
    """Per-rule flag: resolvable from the current input symbol alone.

    Least fixed point: simple rules are immediate; a ternary rule is when
    its condition and continuation are immediate and its failure branch
    is an eps- or fail-rule.
    """
    kind = program.kind
    imm = [kind[i] != K_TERNARY for i in range(len(program.rules))]
    changed = True
    while changed:
        changed = False
        for i in range(len(program.rules)):
            if imm[i] or kind[i] != K_TERNARY:
                continue
            x, y, z = program.tx[i], program.ty[i], program.tz[i]
            if imm[x] and imm[y] and kind[z] in (K_EPS, K_FAIL):
                imm[i] = True
                changed = True
    return imm


class Parser:
    """Streaming parser for one input. Feed bytes, then call finish()."""

    def __init__(self, program, depth=INFINITE, head_check=False,
                 track_visited=True, on_table=None, on_transition=None):
        if depth != INFINITE:
            depth = int(depth)
            if depth < 0:
                raise ValueError("speculation depth must be >= 0")
        self.program = program
        self.depth = depth
        self.head_check = head_check
        self.table = PrefixTable(len(program.rules))
        self.revdeps = RevDeps(len(program.rules))
        self.state = ExpansionState([program.start], 0)
        self.emitted = 0
        self.finished = False
        self.fed = 0
        self._steps = StepStats(track_visited=track_visited)
        self._immediate = classify_immediate(program)
        self._max_cols = 0
        self._on_table = on_table
        self._on_transition = on_transition

    @property
    def stored_cols(self):
        return len(self.table)

    def feed(self, byte):
        if self.finished:
            raise RuntimeError("feed after finish")
        if not 0 <= byte <= 255:
            raise ValueError("feed takes a single byte value")
        return self._advance(byte)

    def finish(self):
        """Feed the end marker; afterwards the verdict is final."""
        if self.finished:
            raise RuntimeError("finish called twice")
        bits = self._advance(END_MARK)
        self.finished = True
        verdict = ACCEPT if not self.state.stack else REJECT
        return bits, verdict

    def _advance(self, byte):
        fix(self.program, self.table, self.revdeps, byte)
        self.fed += 1
        if len(self.table) > self._max_cols:
            self._max_cols = len(self.table)
        if self._on_table is not None:
            self._on_table(self, byte)
        bits, state = run_to_quiescence(
            self.program, self.table, self.state, self.depth,
            stats=self._steps, head_check=self.head_check,
            trace=self._on_transition,
        )
        self.state = state
        cut = state.offset - self.table.base
        if cut:
            self.table.truncate(cut)
            self.revdeps.truncate(cut)
            self._steps.drop_below(self.table.base)
        self.emitted += len(bits)
        return bits

    def stats(self):
        t = self.table
        non_imm = sum(
            n for i, n in enumerate(t.resolved_by_row) if not self._immediate[i]
        )
        return Stats(
            max_cols=self._max_cols,
            resolved_entries=t.resolved_total,
            non_immediate_entries=non_imm,
            speculation_steps=self._steps.speculation_steps,
            visited_entries=self._steps.visited_total if self._steps.track_visited else 0,
            expansion_steps=self._steps.expansion_steps,
        )


def parse_bytes(program, data, depth=INFINITE, **kw):
    """Run a whole input through a fresh parser; returns (code, verdict)."""
    p = Parser(program, depth=depth, **kw)
    chunks = [p.feed(b) for b in bytes(data)]
    last, verdict = p.finish()
    chunks.append(last)
    return "".join(chunks), verdict
