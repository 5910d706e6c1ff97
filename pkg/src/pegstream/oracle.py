"""Reference semantics: the full right-to-left parse table, plus bit codes
and parse trees decoded from them.

The full table for an input of length n has n+1 columns; the last column
corresponds to the end-marker position, where every terminal rule fails.
It is computed column by column from the right, running each column to a
fixed point, so it terminates on every program — cells that the
operational semantics leaves undefined simply stay BOTTOM.

This module is deliberately independent of the streaming engine; the two
are cross-checked against each other in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .grammar import K_EPS, K_FAIL, K_TERM, K_TERNARY
from .table import BOTTOM, FAIL, format_rows


class CodeError(ValueError):
    """A parse code that does not decode against the program and input."""


class FullTable:
    """All parsing results for every suffix of one input."""

    def __init__(self, program, data):
        self.program = program
        self.data = bytes(data)
        self.cols = [[BOTTOM] * len(program.rules) for _ in range(len(self.data) + 1)]

    def read(self, row, col):
        return self.cols[col][row]

    @property
    def ncols(self):
        return len(self.cols)

    def dump(self):
        return format_rows(self.program.names, self.ncols, lambda i, j: self.cols[j][i])


def full_table(program, data):
    """Tabulate the whole input, rightmost column first."""
    data = bytes(data)
    t = FullTable(program, data)
    cols = t.cols
    n = len(data)
    kind, term = program.kind, program.term
    tx, ty, tz = program.tx, program.ty, program.tz
    nrules = len(program.rules)
    for j in range(n, -1, -1):
        col = cols[j]
        byte = data[j] if j < n else None
        changed = True
        while changed:
            changed = False
            for i in range(nrules):
                if col[i] != BOTTOM:
                    continue
                k = kind[i]
                if k == K_EPS:
                    v = 0
                elif k == K_FAIL:
                    v = FAIL
                elif k == K_TERM:
                    v = 1 if byte == term[i] else FAIL
                else:
                    cv = col[tx[i]]
                    if cv == BOTTOM:
                        continue
                    if cv == FAIL:
                        v = col[tz[i]]
                        if v == BOTTOM:
                            continue
                    else:
                        assert j + cv <= n
                        yv = cols[j + cv][ty[i]]
                        if yv == BOTTOM:
                            continue
                        v = FAIL if yv == FAIL else cv + yv
                col[i] = v
                changed = True
    return t


def match(program, rule, data):
    """Result of running one rule on the whole input: FAIL, BOTTOM, or the
    number of bytes consumed."""
    return full_table(program, data).read(rule, 0)


def build_code(program, t, rule):
    """Bit code of the matching derivation rooted at (rule, 0).

    Emits '0' then both subcodes where a ternary condition succeeded, '1'
    then the failure-branch code where it failed; simple rules are silent.
    """
    v = t.read(rule, 0)
    if v < 0:
        raise CodeError("no matching derivation to encode")
    out = []
    stack = [(rule, 0)]
    kind = t.program.kind
    tx, ty, tz = t.program.tx, t.program.ty, t.program.tz
    while stack:
        i, j = stack.pop()
        if kind[i] != K_TERNARY:
            continue
        cv = t.read(tx[i], j)
        assert cv != BOTTOM
        if cv == FAIL:
            out.append("1")
            stack.append((tz[i], j))
        else:
            out.append("0")
            stack.append((ty[i], j + cv))
            stack.append((tx[i], j))
    return "".join(out)


# ---------------------------------------------------------------------------
# Parse trees

@dataclass
class Leaf:
    """A leaf labeled by the empty string (byte is None) or one byte."""

    byte: object = None


@dataclass
class Internal:
    """A rule node; tag 0 pairs with two children, tag 1 or None with one."""

    rule: int
    tag: object  # 0, 1, or None for simple rules
    children: list = field(default_factory=list)


def decode(program, rule, code, data):
    """Rebuild the parse tree that ``code`` encodes for (rule, data)."""
    data = bytes(data)
    kind, term = program.kind, program.term
    tx, ty, tz = program.tx, program.ty, program.tz
    root_holder = []
    stack = [(rule, root_holder)]
    ci = 0
    pos = 0
    while stack:
        i, parent = stack.pop()
        k = kind[i]
        if k == K_EPS:
            parent.append(Internal(i, None, [Leaf(None)]))
        elif k == K_TERM:
            if pos >= len(data) or data[pos] != term[i]:
                raise CodeError(f"input byte at {pos} does not fit the code")
            parent.append(Internal(i, None, [Leaf(term[i])]))
            pos += 1
        elif k == K_FAIL:
            raise CodeError("failing rule inside a matching derivation")
        else:
            if ci >= len(code):
                raise CodeError("code exhausted before the tree was complete")
            bit = code[ci]
            ci += 1
            node = Internal(i, 0 if bit == "0" else 1)
            parent.append(node)
            if bit == "0":
                stack.append((ty[i], node.children))
                stack.append((tx[i], node.children))
            elif bit == "1":
                stack.append((tz[i], node.children))
            else:
                raise CodeError(f"bad code symbol {bit!r}")
    if ci != len(code):
        raise CodeError("trailing bits after the tree was complete")
    return root_holder[0]


def flatten(tree):
    """In-order concatenation of the leaf bytes: the consumed input."""
    out = []
    stack = [tree]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            if node.byte is not None:
                out.append(node.byte)
        else:
            stack.extend(reversed(node.children))
    return bytes(out)


def tree_size(tree):
    n = 0
    stack = [tree]
    while stack:
        node = stack.pop()
        n += 1
        if isinstance(node, Internal):
            stack.extend(node.children)
    return n
