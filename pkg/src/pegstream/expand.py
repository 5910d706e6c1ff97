"""Leftmost parse-tree expansion over a (prefix) table, emitting code bits.

The state is a stack of rule ids (top = next node to expand) plus an
absolute input offset. A ternary node expands to '0' (condition known to
succeed, or the failure branch provably doomed within the speculation
budget) or '1' (condition known to fail); a simple node with a resolved
cell pops and advances the offset. A state with no enabled transition is
quiescent — more input may wake it up later.

Offsets never move backwards, so columns behind the offset can be
truncated without affecting any future transition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .grammar import K_TERNARY
from .table import BOTTOM, FAIL

INFINITE = float("inf")

_HASH_MULT = 0x100000001B3
_HASH_MASK = (1 << 64) - 1

#: Steps without offset progress before the cycle detector engages.
_CYCLE_PATIENCE = 64


class DivergenceError(Exception):
    """The expansion loops: the program does not handle this input."""


@dataclass
class StepStats:
    """Work counters for the dynamic analysis, accumulated over a parse."""

    speculation_steps: int = 0
    expansion_steps: int = 0
    visited: set = field(default_factory=set)
    visited_dropped: int = 0  # cells counted, then truncated away for good
    track_visited: bool = True

    @property
    def visited_total(self):
        return self.visited_dropped + len(self.visited)

    def drop_below(self, base):
        # the offset never backs up, so a truncated cell is never re-read
        if self.track_visited:
            live = {c for c in self.visited if c[1] >= base}
            self.visited_dropped += len(self.visited) - len(live)
            self.visited = live


@dataclass
class ExpansionState:
    stack: list  # rule ids, top at the end
    offset: int

    def copy(self):
        return ExpansionState(list(self.stack), self.offset)

    def top_first(self):
        return list(reversed(self.stack))


def fails(program, table, stack, offset, budget, stats=None):
    """True when the whole stack is guaranteed to fail from ``offset``.

    Walks from the top: a failed head cell settles it; a consumed head
    spends one budget unit and moves past. An unresolved cell, an empty
    stack, or an exhausted budget means no guarantee.
    """
    read = table.read
    idx = len(stack) - 1
    j = offset
    while idx >= 0:
        i = stack[idx]
        if stats is not None:
            stats.speculation_steps += 1
            if stats.track_visited:
                stats.visited.add((i, j))
        v = read(i, j)
        if v == FAIL:
            return True
        if v == BOTTOM or budget == 0:
            return False
        budget -= 1
        j += v
        idx -= 1
    return False


def step(program, table, state, depth, stats=None, head_check=False):
    """One transition, or None when the state is quiescent.

    Pure: returns (bits, new_state). ``depth`` is the speculation budget;
    0 turns the failure-branch analysis off entirely unless ``head_check``
    grants the free head inspection.
    """
    s = state.copy()
    bit = _step_inplace(
        program, table, s.stack, state.offset, depth,
        stats if stats is not None else StepStats(track_visited=False),
        head_check,
    )
    if bit is None:
        return None
    label, new_offset = bit
    s.offset = new_offset
    return label, s


def _step_inplace(program, table, stack, offset, depth, stats, head_check):
    """Mutates ``stack``; returns (emitted_bits, new_offset) or None."""
    if not stack:
        return None
    i = stack[-1]
    if program.kind[i] == K_TERNARY:
        x, y, z = program.tx[i], program.ty[i], program.tz[i]
        cv = table.read(x, offset)
        if stats.track_visited:
            stats.visited.add((x, offset))
        if cv >= 0:
            stats.expansion_steps += 1
            stack[-1] = y
            stack.append(x)
            return "0", offset
        if depth > 0 or head_check:
            budget = depth if depth > 0 else 0
            stack[-1] = z
            doomed = fails(program, table, stack, offset, budget, stats)
            stack[-1] = i
            if doomed:
                stats.expansion_steps += 1
                stack[-1] = y
                stack.append(x)
                return "0", offset
        if cv == FAIL:
            stats.expansion_steps += 1
            stack[-1] = z
            return "1", offset
        return None
    v = table.read(i, offset)
    if stats.track_visited:
        stats.visited.add((i, offset))
    if v >= 0:
        stats.expansion_steps += 1
        stack.pop()
        return "", offset + v
    return None


def run_to_quiescence(program, table, state, depth, stats=None,
                      head_check=False, trace=None):
    """Iterate transitions until none is enabled; returns (bits, state).

    A state recurring at an unchanged offset means no amount of waiting
    will help — the input is unhandled — and raises DivergenceError
    instead of spinning. Detection uses a rolling stack hash with a full
    comparison on collision, and only engages after a patience threshold
    so ordinary runs pay nothing.

    Divergence can also grow the stack forever without repeating a state
    (speculation keeps expanding a rule whose cell never resolves). While
    the offset is stuck, honest expansion only adds frames of one
    root-path of a subtree spanning no input, with at most one pending
    sibling per level; rules repeat along such a path only in derivations
    that contain themselves. Exceeding twice the rule count in new frames
    at one offset therefore also means divergence.
    """
    if stats is None:
        stats = StepStats(track_visited=False)
    s = state.copy()
    stack = s.stack
    out = []
    stalled = 0
    seen = None
    stored = None
    depth_cap = len(stack) + 2 * len(program.rules) + 16
    while True:
        if len(stack) > depth_cap:
            raise DivergenceError(
                "expansion grows without consuming input "
                f"(offset {s.offset}, stack depth {len(stack)})"
            )
        if stalled >= _CYCLE_PATIENCE:
            if seen is None:
                seen, stored = set(), {}
            h = _stack_hash(stack)
            if h in seen:
                match = stored.get(h)
                if match is None:
                    stored[h] = [list(stack)]
                else:
                    if any(prev == stack for prev in match):
                        raise DivergenceError(
                            "expansion loops without consuming input "
                            f"(offset {s.offset}, stack depth {len(stack)})"
                        )
                    match.append(list(stack))
            else:
                seen.add(h)
        before = None if trace is None else (list(stack), s.offset)
        r = _step_inplace(program, table, stack, s.offset, depth, stats, head_check)
        if r is None:
            return "".join(out), s
        label, new_offset = r
        out.append(label)
        if trace is not None:
            trace(before, label, (list(stack), new_offset))
        if new_offset != s.offset:
            s.offset = new_offset
            stalled = 0
            seen = None
            stored = None
            depth_cap = len(stack) + 2 * len(program.rules) + 16
        else:
            stalled += 1


def _stack_hash(stack):
    h = 0xCBF29CE484222325
    for x in stack:
        h = ((h ^ x) * _HASH_MULT) & _HASH_MASK
    return h
